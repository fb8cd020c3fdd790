// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quantlearn {

inline constexpr std::size_t kSceneSize = 20;
inline constexpr std::size_t kQuantifierCount = 10;

/// Region of the two-set diagram an entity falls in. Null marks an empty slot.
enum class Zone : std::uint8_t { AOnly = 0, AAndB = 1, BOnly = 2, Outside = 3, Null = 4 };

inline constexpr std::size_t kZoneCount = 5;

using Scene = std::array<Zone, kSceneSize>;

struct ZoneCounts {
  int a_only = 0;
  int ab = 0;
  int b_only = 0;
  int outside = 0;
  int null = 0;

  int total() const noexcept { return a_only + ab + b_only + outside + null; }
  friend bool operator==(const ZoneCounts&, const ZoneCounts&) = default;
};

std::string to_string(const ZoneCounts& c);

/// Table order; the enumerator value is also the one-hot index.
enum class Quantifier : std::uint8_t {
  AllAB = 0,
  NotAllAB,
  MostAB,
  MostANonB,
  ExactlyHalfAB,
  OnlyAB,
  NotOnlyAB,
  MostBA,
  MostBNonA,
  ExactlyHalfBA,
};

inline constexpr std::size_t index_of(Quantifier q) noexcept { return static_cast<std::size_t>(q); }

using Relation = bool (*)(const ZoneCounts&);

struct QuantifierSpec {
  Quantifier id;
  std::string_view name;
  bool conservative;
  Quantifier dual;
  Relation relation;
};

/// All ten quantifiers in table order.
std::span<const QuantifierSpec, kQuantifierCount> quantifier_table() noexcept;
const QuantifierSpec& spec_of(Quantifier q) noexcept;
std::string_view name_of(Quantifier q) noexcept;
std::optional<Quantifier> parse_quantifier(std::string_view name) noexcept;
std::array<Quantifier, kQuantifierCount> all_quantifiers() noexcept;

ZoneCounts zone_counts(const Scene& scene) noexcept;

inline bool evaluate(const QuantifierSpec& q, const ZoneCounts& c) { return q.relation(c); }
inline bool evaluate(Quantifier q, const ZoneCounts& c) { return spec_of(q).relation(c); }

/// B := A ∩ B. Entities of B\A move outside.
ZoneCounts restrict_to_a(const ZoneCounts& c) noexcept;

/// Q(B)(A): A\B and B\A exchange roles.
ZoneCounts swap_arguments(const ZoneCounts& c) noexcept;

/// Calls fn on every 5-tuple of non-negative counts summing to total, in
/// lexicographic order.
void for_each_counts(int total, const std::function<void(const ZoneCounts&)>& fn);
std::vector<ZoneCounts> enumerate_counts(int total);

/// Outcome of an exhaustive property check. `witness` is set iff the property fails.
struct PropertyCheck {
  std::optional<ZoneCounts> witness;
  bool holds() const noexcept { return !witness.has_value(); }
};

PropertyCheck check_conservative(const QuantifierSpec& q, int total);
PropertyCheck check_duality(const QuantifierSpec& q, const QuantifierSpec& dual, int total);
PropertyCheck check_duality(const QuantifierSpec& q, int total);
PropertyCheck check_symmetric(const QuantifierSpec& q, int total);

struct VerificationRow {
  const QuantifierSpec* spec;
  PropertyCheck conservative;
  PropertyCheck duality;
  PropertyCheck symmetric;
};

struct VerificationReport {
  int max_total = 0;
  std::vector<VerificationRow> rows;

  /// Conservativity verdicts agree with each spec's flag and every duality holds.
  bool consistent() const noexcept;
};

/// Runs all three checks for every quantifier in `table`. Duals are looked up
/// in the same table by id.
VerificationReport verify_quantifiers(std::span<const QuantifierSpec> table, int max_total);

}  // namespace quantlearn
