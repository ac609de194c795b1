/*
 * Copyright 2026 The adaopt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADAOPT_CORE_ERRORS_HPP
#define ADAOPT_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adaopt {

/// Stable error categories; mirrored one-to-one by the C API status codes.
enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    DivisionByZero,
    NegativeEntry,
    NonFiniteInput,
    NonFiniteState,
    InsufficientHistory,
    NotACriticalPoint,
    ConfigError,
    IoError,
    ExperimentFailure,
};

/// Base exception carrying a stable ErrorCode alongside the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what_arg)
        : std::runtime_error(what_arg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg)
        : Error(ErrorCode::DimensionMismatch, msg) {}
};

class DivisionByZero : public Error {
public:
    explicit DivisionByZero(const std::string& msg)
        : Error(ErrorCode::DivisionByZero, msg) {}
};

class NegativeEntry : public Error {
public:
    explicit NegativeEntry(const std::string& msg)
        : Error(ErrorCode::NegativeEntry, msg) {}
};

class NonFiniteInput : public Error {
public:
    explicit NonFiniteInput(const std::string& msg)
        : Error(ErrorCode::NonFiniteInput, msg) {}
};

class NonFiniteState : public Error {
public:
    explicit NonFiniteState(const std::string& msg)
        : Error(ErrorCode::NonFiniteState, msg) {}
};

class InsufficientHistory : public Error {
public:
    explicit InsufficientHistory(const std::string& msg)
        : Error(ErrorCode::InsufficientHistory, msg) {}
};

class NotACriticalPoint : public Error {
public:
    explicit NotACriticalPoint(const std::string& msg)
        : Error(ErrorCode::NotACriticalPoint, msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg)
        : Error(ErrorCode::ConfigError, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg)
        : Error(ErrorCode::IoError, msg) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg)
        : Error(ErrorCode::InvalidArgument, msg) {}
};

class ExperimentFailure : public Error {
public:
    explicit ExperimentFailure(const std::string& msg)
        : Error(ErrorCode::ExperimentFailure, msg) {}
};

}  // namespace adaopt

#endif  // ADAOPT_CORE_ERRORS_HPP
