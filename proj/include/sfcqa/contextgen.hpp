#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "sfcqa/netmodel.hpp"

namespace sfcqa::contextgen {

inline constexpr std::string_view kTemplateV1 = "v1";
inline constexpr std::size_t kDefaultCharBudget = 1800;

/// Half-open character range [start, end) into ContextDoc::text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct ContextDoc {
  netmodel::DcId dc;
  std::string template_version;
  std::string text;
  std::map<std::string, Span> offsets;  // fact key -> span
  std::size_t char_budget = kDefaultCharBudget;
};

struct ContextOptions {
  std::string template_version{kTemplateV1};
  std::size_t char_budget = kDefaultCharBudget;
};

// Fact keys registered by the v1 template.
namespace fact {
inline constexpr std::string_view kDcName = "dc_name";
inline constexpr std::string_view kAvailability = "availability";  // "A compute units and B storage units"
inline constexpr std::string_view kAvailCompute = "avail_compute";
inline constexpr std::string_view kAvailStorage = "avail_storage";
inline constexpr std::string_view kHostedTotal = "hosted_total";
inline constexpr std::string_view kIdleTotal = "idle_total";
inline constexpr std::string_view kNeighborCount = "neighbor_count";
inline constexpr std::string_view kYes = "yes";
inline constexpr std::string_view kNo = "no";
std::string hosted(netmodel::VnfType type);
std::string idle(netmodel::VnfType type);
std::string demand(netmodel::VnfType type);
std::string chain(netmodel::SfcType type);
std::string received(netmodel::SfcType type);
std::string pending(netmodel::SfcType type);
std::string neighbor(netmodel::DcId dc);     // "DC4"
std::string neighbor_bw(netmodel::DcId dc);  // "750 Mbps"
}  // namespace fact

std::string dc_name(netmodel::DcId dc);

/// Renders the fixed v1 paragraph about one DC: availability, VNF inventory
/// with idle counts, per-VNF compute demand, SFC chains, received and pending
/// request counts, neighbor bandwidth, and the closing yes/no sentence.
/// Throws Error(BudgetExceeded) when the text would exceed the budget and
/// Error(InvalidArgument) for an unknown template version.
ContextDoc render_context(const netmodel::NetworkState& state, netmodel::DcId dc, const ContextOptions& options = {});

struct FactSpan {
  std::string_view text;
  std::size_t start = 0;
};

/// Throws Error(UnknownFact).
FactSpan fact_span(const ContextDoc& doc, std::string_view key);

}  // namespace sfcqa::contextgen
