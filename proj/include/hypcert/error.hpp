#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypcert {

/// Global comparison tolerance used when no configuration is at hand.
inline constexpr double default_tolerance = 1e-9;

/** @brief Base of all toolkit errors. */
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/** @brief Malformed or out-of-domain input (bad ids, y <= 0, unreduced words). */
class input_error : public error {
public:
  using error::error;
};

/** @brief A configured budget or cap was exceeded. */
class budget_error : public error {
public:
  budget_error(const std::string& what, std::size_t reached)
      : error(what), reached_(reached) {}

  /// Partial progress at the moment the budget ran out (greedy count, depth, ...).
  std::size_t reached() const noexcept { return reached_; }

private:
  std::size_t reached_;
};

/** @brief Operation called outside its mathematical domain. */
class domain_error : public error {
public:
  using error::error;
};

/** @brief The two inputs share boundary data, so the pair is elementary. */
class elementary_error : public domain_error {
public:
  using domain_error::domain_error;
};

/** @brief A checked precondition does not hold. */
class precondition_error : public error {
public:
  using error::error;
};

/** @brief Trace and orbit diagnostics disagree near the parabolic band. */
class ambiguity_error : public error {
public:
  ambiguity_error(const std::string& what, double trace, double orbit_rate)
      : error(what), trace_(trace), orbit_rate_(orbit_rate) {}
  double trace() const noexcept { return trace_; }
  double orbit_rate() const noexcept { return orbit_rate_; }

private:
  double trace_;
  double orbit_rate_;
};

/** @brief A bounded search ran out of candidates without a witness. */
class search_exhausted : public error {
public:
  search_exhausted(const std::string& what, std::size_t examined)
      : error(what), examined_(examined) {}
  std::size_t examined() const noexcept { return examined_; }

private:
  std::size_t examined_;
};

}  // namespace hypcert
