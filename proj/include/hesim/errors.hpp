// Copyright 2026 The HESIM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace hesim {

/// Base class for every error raised by the toolkit. The CLI maps these to
/// exit code 2 (data error).
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
   public:
    using Error::Error;
};

/// Image dimensions do not tile a CFA layout, or two planes disagree in size.
class LayoutError : public Error {
   public:
    using Error::Error;
};

/// Not enough samples (frames, trials, observations) for an estimate.
class InsufficientDataError : public Error {
   public:
    using Error::Error;
};

/// Design matrix or data set without enough diversity to identify a model.
class RankError : public Error {
   public:
    using Error::Error;
};

class SingularityError : public Error {
   public:
    SingularityError(const std::string& what, std::size_t column) : Error(what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

   private:
    std::size_t column_;
};

class DivergenceError : public Error {
   public:
    DivergenceError(const std::string& what, std::size_t iteration) : Error(what), iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

   private:
    std::size_t iteration_;
};

/// Model parameters violating an invariant (e.g. |rho| > 1).
class ParameterError : public Error {
   public:
    using Error::Error;
};

/// Malformed file contents (bad magic, truncated payload, inconsistent fields).
class FormatError : public Error {
   public:
    using Error::Error;
};

class IoError : public Error {
   public:
    using Error::Error;
};

class VersionError : public FormatError {
   public:
    using FormatError::FormatError;
};

class MissingFileError : public IoError {
   public:
    explicit MissingFileError(const std::filesystem::path& path)
        : IoError("missing file: " + path.string()), path_(path) {}
    const std::filesystem::path& path() const noexcept { return path_; }

   private:
    std::filesystem::path path_;
};

}  // namespace hesim
