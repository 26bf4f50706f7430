#pragma once

#include <compare>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>

namespace lns {

namespace detail {

// Process-wide string table. Entries are never erased, so the returned
// pointers stay valid for the lifetime of the program.
inline const std::string* intern(std::string_view text) {
  static std::mutex mutex;
  static std::unordered_set<std::string> table;
  std::lock_guard<std::mutex> lock(mutex);
  return &*table.emplace(text).first;
}

} // namespace detail

/// Interned string. Equality is pointer equality; ordering is lexicographic so
/// that sorted containers do not depend on allocation order.
class Atom {
public:
  Atom() : text_(detail::intern("")) {}
  explicit Atom(std::string_view text) : text_(detail::intern(text)) {}

  const std::string& str() const noexcept { return *text_; }
  bool empty() const noexcept { return text_->empty(); }

  friend bool operator==(Atom a, Atom b) noexcept { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(Atom a, Atom b) noexcept {
    if (a.text_ == b.text_) return std::strong_ordering::equal;
    return a.text_->compare(*b.text_) < 0 ? std::strong_ordering::less
                                           : std::strong_ordering::greater;
  }

  std::size_t hash() const noexcept { return std::hash<std::string>{}(*text_); }

private:
  const std::string* text_;
};

inline std::ostream& operator<<(std::ostream& os, Atom a) { return os << a.str(); }

/// An atom tagged with the namespace it lives in. Two names with the same
/// spelling in different namespaces are different types and never compare.
template <class Tag>
class TaggedAtom {
public:
  TaggedAtom() = default;
  explicit TaggedAtom(std::string_view text) : atom_(text) {}
  explicit TaggedAtom(Atom atom) : atom_(atom) {}

  Atom atom() const noexcept { return atom_; }
  const std::string& str() const noexcept { return atom_.str(); }

  friend bool operator==(const TaggedAtom&, const TaggedAtom&) = default;
  friend std::strong_ordering operator<=>(const TaggedAtom& a, const TaggedAtom& b) {
    return a.atom_ <=> b.atom_;
  }

private:
  Atom atom_;
};

template <class Tag>
std::ostream& operator<<(std::ostream& os, const TaggedAtom<Tag>& a) {
  return os << a.str();
}

struct LabelTag {};
struct SymbolTag {};
struct VariableTag {};

using Label = TaggedAtom<LabelTag>;
using Symbol = TaggedAtom<SymbolTag>;
using Variable = TaggedAtom<VariableTag>;

inline std::size_t hash_combine(std::size_t seed, std::size_t value) noexcept {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace lns

template <>
struct std::hash<lns::Atom> {
  std::size_t operator()(lns::Atom a) const noexcept { return a.hash(); }
};

template <class Tag>
struct std::hash<lns::TaggedAtom<Tag>> {
  std::size_t operator()(const lns::TaggedAtom<Tag>& a) const noexcept {
    return a.atom().hash();
  }
};
