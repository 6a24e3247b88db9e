#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>

namespace qals {

// Root of every exception thrown by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Operands with incompatible dimensions were combined.
class contract_error : public error {
public:
  using error::error;
};

// A value violated a documented invariant (bad parameter, bad graph, ...).
class validation_error : public error {
public:
  using error::error;
};

// Exhaustive enumeration was requested beyond its size guard.
class capacity_error : public error {
public:
  using error::error;
};

class parse_error : public error {
public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Failures originating in a sampler backend.
class sampler_error : public error {
public:
  using error::error;
};

class transport_error : public sampler_error {
public:
  using sampler_error::sampler_error;
};

class malformed_response_error : public sampler_error {
public:
  using sampler_error::sampler_error;
};

class dimension_mismatch_error : public sampler_error {
public:
  using sampler_error::sampler_error;
};

// Must be called from inside a catch block. Rethrows the in-flight
// exception with `context` prefixed to its message, keeping its type;
// exception types not listed here propagate unchanged.
[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  const auto prefixed = [&](const std::exception& e) { return context + ": " + e.what(); };
  try {
    throw;
  } catch (const transport_error& e) {
    throw transport_error(prefixed(e));
  } catch (const malformed_response_error& e) {
    throw malformed_response_error(prefixed(e));
  } catch (const dimension_mismatch_error& e) {
    throw dimension_mismatch_error(prefixed(e));
  } catch (const sampler_error& e) {
    throw sampler_error(prefixed(e));
  } catch (const capacity_error& e) {
    throw capacity_error(prefixed(e));
  } catch (const validation_error& e) {
    throw validation_error(prefixed(e));
  } catch (const contract_error& e) {
    throw contract_error(prefixed(e));
  }
}

}  // namespace qals
