#pragma once

#include <stdexcept>
#include <string>

namespace oam {

// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A winding number left the configured |ell| bound.
class EllOutOfRange : public Error {
public:
    using Error::Error;
};

// Qubit amplitudes whose squared moduli do not sum to one.
class NotNormalized : public Error {
public:
    using Error::Error;
};

// Overlap requested between states of different total photon number.
class PhotonNumberMismatch : public Error {
public:
    using Error::Error;
};

// Converter input is not a path dual-rail qubit on the expected pair.
class InputNotDualRail : public Error {
public:
    using Error::Error;
};

// Merging or (de)multiplexing attempted outside the prescribed index order.
class OrderViolation : public Error {
public:
    using Error::Error;
};

// Sorter input carries a winding number above the declared bound.
class EllOutOfDeclaredRange : public Error {
public:
    using Error::Error;
};

// Circuit file violates the schema (missing/ill-typed fields, bad syntax).
class SchemaError : public Error {
public:
    using Error::Error;
};

class UnknownElement : public Error {
public:
    using Error::Error;
};

class UndeclaredPath : public Error {
public:
    using Error::Error;
};

class VersionMismatch : public Error {
public:
    using Error::Error;
};

class NoOracleForCircuit : public Error {
public:
    using Error::Error;
};

}  // namespace oam
