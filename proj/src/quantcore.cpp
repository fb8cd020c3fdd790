// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/quantcore.hpp"

#include <algorithm>
#include <stdexcept>

namespace quantlearn {
namespace {

constexpr std::array<QuantifierSpec, kQuantifierCount> kTable{{
    {Quantifier::AllAB, "all_ab", true, Quantifier::OnlyAB,
     [](const ZoneCounts& c) { return c.a_only == 0; }},
    {Quantifier::NotAllAB, "not_all_ab", true, Quantifier::NotOnlyAB,
     [](const ZoneCounts& c) { return c.a_only != 0; }},
    {Quantifier::MostAB, "most_ab", true, Quantifier::MostBA,
     [](const ZoneCounts& c) { return c.a_only < c.ab; }},
    {Quantifier::MostANonB, "most_a_nonb", true, Quantifier::MostBNonA,
     [](const ZoneCounts& c) { return c.a_only > c.ab; }},
    {Quantifier::ExactlyHalfAB, "exactly_half_ab", true, Quantifier::ExactlyHalfBA,
     [](const ZoneCounts& c) { return c.a_only == c.ab; }},
    {Quantifier::OnlyAB, "only_ab", false, Quantifier::AllAB,
     [](const ZoneCounts& c) { return c.b_only == 0; }},
    {Quantifier::NotOnlyAB, "not_only_ab", false, Quantifier::NotAllAB,
     [](const ZoneCounts& c) { return c.b_only != 0; }},
    {Quantifier::MostBA, "most_ba", false, Quantifier::MostAB,
     [](const ZoneCounts& c) { return c.b_only < c.ab; }},
    {Quantifier::MostBNonA, "most_b_nona", false, Quantifier::MostANonB,
     [](const ZoneCounts& c) { return c.b_only > c.ab; }},
    {Quantifier::ExactlyHalfBA, "exactly_half_ba", false, Quantifier::ExactlyHalfAB,
     [](const ZoneCounts& c) { return c.b_only == c.ab; }},
}};

void require_total(int total) {
  if (total < 0 || total > static_cast<int>(kSceneSize)) {
    throw std::invalid_argument("property checks need 0 <= total <= 20, got " +
                                std::to_string(total));
  }
}

template <typename Pred>
PropertyCheck find_witness(int total, Pred&& differs) {
  require_total(total);
  PropertyCheck out;
  // Early exit is not possible through for_each_counts; the space is small.
  for_each_counts(total, [&](const ZoneCounts& c) {
    if (!out.witness && differs(c)) out.witness = c;
  });
  return out;
}

}  // namespace

std::string to_string(const ZoneCounts& c) {
  return "(" + std::to_string(c.a_only) + "," + std::to_string(c.ab) + "," +
         std::to_string(c.b_only) + "," + std::to_string(c.outside) + "," +
         std::to_string(c.null) + ")";
}

std::span<const QuantifierSpec, kQuantifierCount> quantifier_table() noexcept { return kTable; }

const QuantifierSpec& spec_of(Quantifier q) noexcept { return kTable[index_of(q)]; }

std::string_view name_of(Quantifier q) noexcept { return kTable[index_of(q)].name; }

std::optional<Quantifier> parse_quantifier(std::string_view name) noexcept {
  for (const auto& s : kTable) {
    if (s.name == name) return s.id;
  }
  return std::nullopt;
}

std::array<Quantifier, kQuantifierCount> all_quantifiers() noexcept {
  std::array<Quantifier, kQuantifierCount> out{};
  for (std::size_t i = 0; i < kQuantifierCount; ++i) out[i] = kTable[i].id;
  return out;
}

ZoneCounts zone_counts(const Scene& scene) noexcept {
  ZoneCounts c;
  for (Zone z : scene) {
    switch (z) {
      case Zone::AOnly: ++c.a_only; break;
      case Zone::AAndB: ++c.ab; break;
      case Zone::BOnly: ++c.b_only; break;
      case Zone::Outside: ++c.outside; break;
      case Zone::Null: ++c.null; break;
    }
  }
  return c;
}

ZoneCounts restrict_to_a(const ZoneCounts& c) noexcept {
  ZoneCounts r = c;
  r.outside += r.b_only;
  r.b_only = 0;
  return r;
}

ZoneCounts swap_arguments(const ZoneCounts& c) noexcept {
  ZoneCounts r = c;
  std::swap(r.a_only, r.b_only);
  return r;
}

void for_each_counts(int total, const std::function<void(const ZoneCounts&)>& fn) {
  if (total < 0) throw std::invalid_argument("enumerate_counts: negative total");
  ZoneCounts c;
  for (c.a_only = 0; c.a_only <= total; ++c.a_only) {
    for (c.ab = 0; c.ab <= total - c.a_only; ++c.ab) {
      for (c.b_only = 0; c.b_only <= total - c.a_only - c.ab; ++c.b_only) {
        const int rest = total - c.a_only - c.ab - c.b_only;
        for (c.outside = 0; c.outside <= rest; ++c.outside) {
          c.null = rest - c.outside;
          fn(c);
        }
      }
    }
  }
}

std::vector<ZoneCounts> enumerate_counts(int total) {
  std::vector<ZoneCounts> out;
  for_each_counts(total, [&](const ZoneCounts& c) { out.push_back(c); });
  return out;
}

PropertyCheck check_conservative(const QuantifierSpec& q, int total) {
  return find_witness(total, [&](const ZoneCounts& c) {
    return evaluate(q, c) != evaluate(q, restrict_to_a(c));
  });
}

PropertyCheck check_duality(const QuantifierSpec& q, const QuantifierSpec& dual, int total) {
  return find_witness(total, [&](const ZoneCounts& c) {
    return evaluate(q, c) != evaluate(dual, swap_arguments(c));
  });
}

PropertyCheck check_duality(const QuantifierSpec& q, int total) {
  return check_duality(q, spec_of(q.dual), total);
}

PropertyCheck check_symmetric(const QuantifierSpec& q, int total) {
  return find_witness(total, [&](const ZoneCounts& c) {
    return evaluate(q, c) != evaluate(q, swap_arguments(c));
  });
}

bool VerificationReport::consistent() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const VerificationRow& r) {
    return r.conservative.holds() == r.spec->conservative && r.duality.holds();
  });
}

VerificationReport verify_quantifiers(std::span<const QuantifierSpec> table, int max_total) {
  VerificationReport report;
  report.max_total = max_total;
  for (const auto& q : table) {
    auto dual = std::find_if(table.begin(), table.end(),
                             [&](const QuantifierSpec& s) { return s.id == q.dual; });
    if (dual == table.end()) {
      throw std::invalid_argument("dual of " + std::string(q.name) + " missing from table");
    }
    report.rows.push_back({&q, check_conservative(q, max_total),
                           check_duality(q, *dual, max_total), check_symmetric(q, max_total)});
  }
  return report;
}

}  // namespace quantlearn
