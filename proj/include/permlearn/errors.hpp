#ifndef PERMLEARN_ERRORS_HPP
#define PERMLEARN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace permlearn {

// Violated precondition on a public operation (size mismatch, index out of range).
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bad configuration values or flags.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dataset problems such as an empty set or a filter nothing passes.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* what) {
  if (!cond) throw contract_error(what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw contract_error(what);
}

}  // namespace detail
}  // namespace permlearn

#endif  // PERMLEARN_ERRORS_HPP
