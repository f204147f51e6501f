#include "gbam/oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>

namespace gbam {

const char* to_string(OracleModel model) {
  switch (model) {
    case OracleModel::kMam:
      return "mam";
    case OracleModel::kRdm:
      return "rdm";
    case OracleModel::kAllocTc:
      return "alloctc";
  }
  return "?";
}

OracleState OracleState::make(OracleModel model, std::vector<Bandwidth> bcs, Bandwidth capacity) {
  if (bcs.empty()) throw std::invalid_argument("oracle needs at least one class");
  OracleState s{model, std::move(bcs), capacity, {}, {}};
  s.totals.assign(s.bcs.size(), Bandwidth{});
  return s;
}

namespace {

// Signed arithmetic wide enough for any sum of 64-bit bandwidths.
using Wide = __int128;

Bandwidth clamp_to_bandwidth(Wide v) {
  if (v <= 0) return {};
  return Bandwidth{static_cast<std::uint64_t>(v)};
}

void check_request(const OracleState& s, const LspRequest& req) {
  if (req.class_index >= s.bcs.size()) {
    throw AdmissionError(AdmissionErrorKind::kClassOutOfRange,
                         "class " + std::to_string(req.class_index) + " out of range");
  }
  if (s.lsps.count(req.id)) {
    throw AdmissionError(AdmissionErrorKind::kDuplicateLspId,
                         "LSP id " + std::to_string(req.id.value) + " already present");
  }
}

Decision settle(OracleState& s, const LspRequest& req, Bandwidth room) {
  if (req.bandwidth > room) return Decision::blocked(req.bandwidth - room);
  s.totals[req.class_index] += req.bandwidth;
  s.lsps.emplace(req.id, ReleaseRecord{req.id, req.class_index, req.bandwidth});
  return Decision::admitted();
}

void require_model(const OracleState& s, OracleModel model) {
  if (s.model != model) {
    throw std::logic_error(std::string("oracle state is ") + to_string(s.model) + ", not " +
                           to_string(model));
  }
}

}  // namespace

Bandwidth mam_headroom(std::span<const Bandwidth> bcs, std::span<const Bandwidth> totals,
                       ClassIndex c) {
  return saturating_sub(bcs[c], totals[c]);
}

Bandwidth rdm_headroom(std::span<const Bandwidth> bcs, std::span<const Bandwidth> totals,
                       ClassIndex c) {
  // Nested dolls: the classes t..C-1 together may never use more than their
  // BCs together, for every t up to the requesting class.
  Wide suffix_room = 0;
  Wide best = 0;
  bool first = true;
  for (std::size_t t = bcs.size(); t-- > 0;) {
    suffix_room += static_cast<Wide>(bcs[t].kbps()) - static_cast<Wide>(totals[t].kbps());
    if (t <= c) {
      best = first ? suffix_room : std::min(best, suffix_room);
      first = false;
    }
  }
  return clamp_to_bandwidth(best);
}

Bandwidth alloctc_headroom(Bandwidth capacity, std::span<const Bandwidth> totals) {
  Wide used = 0;
  for (auto n : totals) used += n.kbps();
  return clamp_to_bandwidth(static_cast<Wide>(capacity.kbps()) - used);
}

Decision mam_admit(OracleState& state, const LspRequest& req) {
  require_model(state, OracleModel::kMam);
  check_request(state, req);
  return settle(state, req, mam_headroom(state.bcs, state.totals, req.class_index));
}

Decision rdm_admit(OracleState& state, const LspRequest& req) {
  require_model(state, OracleModel::kRdm);
  check_request(state, req);
  return settle(state, req, rdm_headroom(state.bcs, state.totals, req.class_index));
}

Decision alloctc_admit(OracleState& state, const LspRequest& req) {
  require_model(state, OracleModel::kAllocTc);
  check_request(state, req);
  return settle(state, req, alloctc_headroom(state.capacity, state.totals));
}

Decision oracle_admit(OracleState& state, const LspRequest& req) {
  switch (state.model) {
    case OracleModel::kMam:
      return mam_admit(state, req);
    case OracleModel::kRdm:
      return rdm_admit(state, req);
    case OracleModel::kAllocTc:
      return alloctc_admit(state, req);
  }
  throw std::logic_error("unknown oracle model");
}

ReleaseRecord oracle_release(OracleState& state, LspId id) {
  auto it = state.lsps.find(id);
  if (it == state.lsps.end()) {
    throw AdmissionError(AdmissionErrorKind::kUnknownLspId,
                         "unknown LSP id " + std::to_string(id.value));
  }
  const ReleaseRecord rec = it->second;
  state.totals[rec.class_index] -= rec.bandwidth;
  state.lsps.erase(it);
  return rec;
}

OracleEngine::OracleEngine(OracleModel model, std::vector<Bandwidth> bcs, Bandwidth capacity)
    : state_(OracleState::make(model, std::move(bcs), capacity)) {}

LoanSplit OracleEngine::loan_split() const {
  const std::size_t n = state_.bcs.size();
  LoanSplit split{std::vector<Bandwidth>(n), std::vector<Bandwidth>(n)};
  if (state_.model == OracleModel::kMam) return split;

  std::vector<Bandwidth> need(n);
  std::vector<Bandwidth> spare(n);
  for (std::size_t i = 0; i < n; ++i) {
    need[i] = saturating_sub(state_.totals[i], state_.bcs[i]);
    spare[i] = saturating_sub(state_.bcs[i], state_.totals[i]);
  }
  if (state_.model == OracleModel::kRdm) {
    split.via_htl = need;
    return split;
  }
  for (std::size_t b = 0; b < n; ++b) {
    // Walk outward from b; below first on equal distance.
    for (std::size_t d = 1; d < n && !need[b].is_zero(); ++d) {
      for (int side = 0; side < 2 && !need[b].is_zero(); ++side) {
        const bool below = side == 0;
        if (below ? d > b : b + d >= n) continue;
        const std::size_t l = below ? b - d : b + d;
        const Bandwidth take = std::min(need[b], spare[l]);
        spare[l] -= take;
        need[b] -= take;
        (below ? split.via_lth : split.via_htl)[b] += take;
      }
    }
  }
  return split;
}

std::unique_ptr<AdmissionEngine> OracleEngine::fresh() const {
  return std::make_unique<OracleEngine>(state_.model, state_.bcs, state_.capacity);
}

bool StepResult::same_as(const StepResult& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::kAdmit:
      return decision.same_verdict(other.decision);
    case Kind::kRelease:
      return released == other.released;
    case Kind::kReleaseOfBlocked:
      return true;
  }
  return false;
}

void check_trace(std::span<const TraceOp> trace) {
  std::set<LspId> offered;
  std::set<LspId> released;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto where = " at op " + std::to_string(k);
    if (const auto* a = std::get_if<AdmitOp>(&trace[k])) {
      if (!offered.insert(a->request.id).second) {
        throw AdmissionError(AdmissionErrorKind::kMalformedTrace,
                             "admit id " + std::to_string(a->request.id.value) + " repeated" +
                                 where);
      }
    } else {
      const auto id = std::get<ReleaseOp>(trace[k]).id;
      if (!offered.count(id)) {
        throw AdmissionError(AdmissionErrorKind::kMalformedTrace,
                             "release of never-offered id " + std::to_string(id.value) + where);
      }
      if (!released.insert(id).second) {
        throw AdmissionError(AdmissionErrorKind::kMalformedTrace,
                             "double release of id " + std::to_string(id.value) + where);
      }
    }
  }
}

DecisionTrace replay(std::span<const TraceOp> trace, const AdmissionEngine& prototype) {
  check_trace(trace);
  auto engine = prototype.fresh();
  std::set<LspId> live;
  DecisionTrace out;
  out.reserve(trace.size());
  for (const auto& op : trace) {
    if (const auto* a = std::get_if<AdmitOp>(&op)) {
      Decision d = engine->admit(a->request);
      if (d.is_admitted()) live.insert(a->request.id);
      out.push_back({StepResult::Kind::kAdmit, std::move(d), std::nullopt});
    } else {
      const auto id = std::get<ReleaseOp>(op).id;
      if (live.erase(id)) {
        out.push_back({StepResult::Kind::kRelease, Decision{}, engine->release(id)});
      } else {
        out.push_back({StepResult::Kind::kReleaseOfBlocked, Decision{}, std::nullopt});
      }
    }
  }
  return out;
}

}  // namespace gbam
