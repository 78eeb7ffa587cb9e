#include "sfcqa/contextgen.hpp"

#include "sfcqa/error.hpp"

namespace sfcqa::contextgen {

using namespace netmodel;

namespace fact {
std::string hosted(VnfType type) { return "hosted:" + std::string(name(type)); }
std::string idle(VnfType type) { return "idle:" + std::string(name(type)); }
std::string demand(VnfType type) { return "demand:" + std::string(name(type)); }
std::string chain(SfcType type) { return "chain:" + std::string(name(type)); }
std::string received(SfcType type) { return "received:" + std::string(name(type)); }
std::string pending(SfcType type) { return "pending:" + std::string(name(type)); }
std::string neighbor(DcId dc) { return "neighbor:" + std::to_string(dc.value); }
std::string neighbor_bw(DcId dc) { return "neighbor_bw:" + std::to_string(dc.value); }
}  // namespace fact

std::string dc_name(DcId dc) { return "DC" + std::to_string(dc.value); }

namespace {

class TextBuilder {
 public:
  TextBuilder& text(std::string_view s) {
    out_ += s;
    return *this;
  }

  TextBuilder& fact(std::string_view key, std::string_view value) {
    if (value.empty()) throw Error(ErrorKind::InvariantViolation, "empty fact " + std::string(key));
    const Span span{out_.size(), out_.size() + value.size()};
    if (!offsets_.emplace(std::string(key), span).second) {
      throw Error(ErrorKind::InvariantViolation, "fact registered twice: " + std::string(key));
    }
    out_ += value;
    return *this;
  }

  // Opens a fact that encloses later appends; close it with end_fact.
  TextBuilder& begin_fact(std::string_view key) {
    open_.emplace_back(std::string(key), out_.size());
    return *this;
  }

  TextBuilder& end_fact() {
    auto [key, start] = std::move(open_.back());
    open_.pop_back();
    offsets_.emplace(std::move(key), Span{start, out_.size()});
    return *this;
  }

  std::string take_text() { return std::move(out_); }
  std::map<std::string, Span> take_offsets() { return std::move(offsets_); }

 private:
  std::string out_;
  std::map<std::string, Span> offsets_;
  std::vector<std::pair<std::string, std::size_t>> open_;
};

template <class Types, class KeyFn, class ValueFn>
void per_type_list(TextBuilder& b, const Types& types, KeyFn key, ValueFn value) {
  bool first = true;
  for (auto t : types) {
    if (!first) b.text(", ");
    first = false;
    b.text(name(t)).text(" ").fact(key(t), value(t));
  }
}

std::string sequence_text(const std::vector<VnfType>& seq) {
  std::string out;
  for (VnfType t : seq) {
    if (!out.empty()) out += "-";
    out += name(t);
  }
  return out;
}

}  // namespace

ContextDoc render_context(const NetworkState& state, DcId dc_id, const ContextOptions& options) {
  if (options.template_version != kTemplateV1) {
    throw Error(ErrorKind::InvalidArgument, "unknown template version '" + options.template_version + "'");
  }
  const DataCenter& dc = state.dc(dc_id);
  const std::string dcn = dc_name(dc_id);
  const Resources free = available_resources(state, dc_id);

  std::array<std::size_t, kVnfTypes.size()> hosted{};
  for (InstanceId id : dc.hosted) ++hosted[index_of(state.instance(id).type)];
  std::array<std::size_t, kSfcTypes.size()> received{};
  std::array<std::size_t, kSfcTypes.size()> pending{};
  for (const SfcRequest& r : state.requests) {
    if (r.ingress != dc_id) continue;
    ++received[index_of(r.sfc_type)];
    if (r.status == RequestStatus::Pending) ++pending[index_of(r.sfc_type)];
  }
  auto num = [](auto v) { return std::to_string(v); };

  TextBuilder b;
  b.fact(fact::kDcName, dcn).text(" has ");
  b.begin_fact(fact::kAvailability)
      .fact(fact::kAvailCompute, num(free.compute))
      .text(" compute units and ")
      .fact(fact::kAvailStorage, num(free.storage))
      .text(" storage units")
      .end_fact();
  b.text(" available. ");

  b.text(dcn).text(" hosts ").fact(fact::kHostedTotal, num(dc.hosted.size())).text(" VNF instances, ");
  b.fact(fact::kIdleTotal, num(idle_vnf_count(state, dc_id))).text(" of which are idle. ");
  b.text("Hosted VNF instances by type: ");
  per_type_list(b, kVnfTypes, fact::hosted, [&](VnfType t) { return num(hosted[index_of(t)]); });
  b.text(". Idle VNF instances by type: ");
  per_type_list(b, kVnfTypes, fact::idle, [&](VnfType t) { return num(idle_vnf_count(state, dc_id, t)); });

  b.text(". Computational demand per VNF instance in compute units: ");
  per_type_list(b, kVnfTypes, fact::demand, [&](VnfType t) { return num(state.profile(t).compute_demand); });
  b.text(". SFC chains: ");
  bool first = true;
  for (SfcType t : kSfcTypes) {
    if (!first) b.text(", ");
    first = false;
    b.text(name(t)).text(" uses ").fact(fact::chain(t), sequence_text(state.entry(t).vnf_sequence));
  }

  b.text(". SFC requests received by ").text(dcn).text(": ");
  per_type_list(b, kSfcTypes, fact::received, [&](SfcType t) { return num(received[index_of(t)]); });
  b.text(". Pending SFC requests at ").text(dcn).text(": ");
  per_type_list(b, kSfcTypes, fact::pending, [&](SfcType t) { return num(pending[index_of(t)]); });
  b.text(". ");

  const auto nbs = neighbors(state, dc_id);
  b.text(dcn).text(" has ").fact(fact::kNeighborCount, num(nbs.size()));
  b.text(nbs.size() == 1 ? " neighboring DC. " : " neighboring DCs. ");
  for (const Neighbor& nb : nbs) {
    b.text("The link between ").text(dcn).text(" and ").fact(fact::neighbor(nb.dc), dc_name(nb.dc));
    b.text(" has ").fact(fact::neighbor_bw(nb.dc), format_bandwidth(nb.available_kbps)).text(" available. ");
  }

  b.text("The correct reply to a sufficiency question is ").fact(fact::kYes, "yes").text(" or ");
  b.fact(fact::kNo, "no").text(".");

  ContextDoc doc;
  doc.dc = dc_id;
  doc.template_version = options.template_version;
  doc.char_budget = options.char_budget;
  doc.text = b.take_text();
  doc.offsets = b.take_offsets();
  if (doc.text.size() > options.char_budget) {
    throw Error(ErrorKind::BudgetExceeded, dcn + " context needs " + std::to_string(doc.text.size()) +
                                               " characters, budget is " + std::to_string(options.char_budget));
  }
  return doc;
}

FactSpan fact_span(const ContextDoc& doc, std::string_view key) {
  auto it = doc.offsets.find(std::string(key));
  if (it == doc.offsets.end()) throw Error(ErrorKind::UnknownFact, std::string(key));
  const Span s = it->second;
  return {std::string_view(doc.text).substr(s.start, s.end - s.start), s.start};
}

}  // namespace sfcqa::contextgen
