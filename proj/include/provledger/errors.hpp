#pragma once

#include <stdexcept>
#include <string>

namespace provledger {

// Base of every error thrown by the library.
class LedgerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyMapError : public LedgerError {
public:
    EmptyMapError() : LedgerError("verifiable map is empty") {}
};

class KeyNotFoundError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

// The key's path crosses a pruned subtree.
class PrunedPathError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

class DuplicateKeyError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

// Two entries claim different hashes for the same tree position.
class ConflictError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

class RootMismatchError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

class MalformedProofError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

class DecodeError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

class EmptySequenceError : public LedgerError {
public:
    EmptySequenceError() : LedgerError("sequence contains no trees") {}
};

class SignatureError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

class BlockNotFoundError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

class ConfigError : public LedgerError {
public:
    using LedgerError::LedgerError;
};

}  // namespace provledger
