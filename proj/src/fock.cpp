#include "oam/fock.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace oam {

namespace {
std::atomic<std::int64_t> g_ell_max{kDefaultEllMax};
}

std::int64_t ell_max() { return g_ell_max.load(std::memory_order_relaxed); }

void set_ell_max(std::int64_t bound) {
    if (bound < 1) throw Error("set_ell_max: bound must be positive");
    g_ell_max.store(bound, std::memory_order_relaxed);
}

std::int64_t BasisState::photon_count() const {
    std::int64_t n = 0;
    for (const auto& mc : occ) n += mc.count;
    return n;
}

std::int64_t BasisState::occupancy(PathId path) const {
    std::int64_t n = 0;
    for (const auto& mc : occ)
        if (mc.mode.path == path) n += mc.count;
    return n;
}

std::int64_t BasisState::count_at(Mode m) const {
    for (const auto& mc : occ)
        if (mc.mode == m) return mc.count;
    return 0;
}

BasisState make_basis(std::vector<ModeCount> modes) {
    for (const auto& mc : modes)
        if (mc.count <= 0) throw Error("make_basis: occupation counts must be positive");
    std::sort(modes.begin(), modes.end());
    std::vector<ModeCount> merged;
    merged.reserve(modes.size());
    for (const auto& mc : modes) {
        if (!merged.empty() && merged.back().mode == mc.mode)
            merged.back().count += mc.count;
        else
            merged.push_back(mc);
    }
    return BasisState{std::move(merged)};
}

PureState PureState::vacuum() {
    PureState s;
    s.photons = 0;
    s.terms.emplace(BasisState{}, Complex{1.0, 0.0});
    return s;
}

double PureState::norm_sq() const {
    double total = 0.0;
    for (const auto& [basis, amp] : terms) total += std::norm(amp);
    return total;
}

double PureState::norm() const { return std::sqrt(norm_sq()); }

Complex PureState::amplitude(const BasisState& b) const {
    auto it = terms.find(b);
    return it == terms.end() ? Complex{0.0, 0.0} : it->second;
}

void add_term(PureState& state, BasisState basis, Complex amp) {
    if (basis.photon_count() != state.photons)
        throw Error("add_term: photon number mismatch within a state");
    auto [it, inserted] = state.terms.emplace(std::move(basis), amp);
    if (!inserted) it->second += amp;
}

void prune(PureState& state, double threshold) {
    for (auto it = state.terms.begin(); it != state.terms.end();) {
        if (std::abs(it->second) < threshold)
            it = state.terms.erase(it);
        else
            ++it;
    }
}

void normalize(PureState& state) {
    const double n = state.norm();
    if (n <= 0.0) throw Error("normalize: zero state");
    for (auto& [basis, amp] : state.terms) amp /= n;
}

PureState make_single_photon(PathId path, std::int64_t ell) {
    if (std::llabs(ell) > ell_max())
        throw EllOutOfRange("make_single_photon: |ell| exceeds bound");
    PureState s;
    s.photons = 1;
    s.terms.emplace(make_basis({{Mode{path, ell}, 1}}), Complex{1.0, 0.0});
    return s;
}

PureState make_qubit(const QubitSpec& spec) {
    if (spec.path_zero == spec.path_one)
        throw Error("make_qubit: dual-rail paths must differ");
    const double total = std::norm(spec.alpha) + std::norm(spec.beta);
    if (std::abs(total - 1.0) > kNormTol)
        throw NotNormalized("make_qubit: |alpha|^2 + |beta|^2 != 1");
    PureState s;
    s.photons = 1;
    if (std::abs(spec.alpha) >= kAmpPrune)
        s.terms.emplace(make_basis({{Mode{spec.path_zero, 0}, 1}}), spec.alpha);
    if (std::abs(spec.beta) >= kAmpPrune)
        s.terms.emplace(make_basis({{Mode{spec.path_one, 0}, 1}}), spec.beta);
    return s;
}

PureState tensor(const PureState& a, const PureState& b) {
    PureState out;
    out.photons = a.photons + b.photons;
    for (const auto& [ba, aa] : a.terms) {
        for (const auto& [bb, ab] : b.terms) {
            std::vector<ModeCount> merged = ba.occ;
            merged.insert(merged.end(), bb.occ.begin(), bb.occ.end());
            add_term(out, make_basis(std::move(merged)), aa * ab);
        }
    }
    prune(out);
    return out;
}

Complex inner_product(const PureState& a, const PureState& b) {
    if (a.photons != b.photons)
        throw PhotonNumberMismatch("inner_product: photon numbers differ");
    // iterate over the smaller map
    const PureState& lhs = a.term_count() <= b.term_count() ? a : b;
    const PureState& rhs = a.term_count() <= b.term_count() ? b : a;
    Complex acc{0.0, 0.0};
    for (const auto& [basis, amp] : lhs.terms) {
        auto it = rhs.terms.find(basis);
        if (it == rhs.terms.end()) continue;
        if (&lhs == &a)
            acc += std::conj(amp) * it->second;
        else
            acc += std::conj(it->second) * amp;
    }
    return acc;
}

double fidelity(const PureState& a, const PureState& b) {
    const double f = std::norm(inner_product(a, b));
    return f > 1.0 ? 1.0 : f;
}

double marginal_path_probability(const PureState& state, PathId path) {
    double p = 0.0;
    for (const auto& [basis, amp] : state.terms)
        if (basis.occupancy(path) > 0) p += std::norm(amp);
    return p > 1.0 ? 1.0 : p;
}

std::optional<PureState> project_path_occupancy(const PureState& state, PathId path,
                                                bool occupied) {
    PureState out;
    out.photons = state.photons;
    double weight = 0.0;
    for (const auto& [basis, amp] : state.terms) {
        if ((basis.occupancy(path) > 0) == occupied) {
            out.terms.emplace(basis, amp);
            weight += std::norm(amp);
        }
    }
    if (out.terms.empty() || weight <= 0.0) return std::nullopt;
    const double scale = 1.0 / std::sqrt(weight);
    for (auto& [basis, amp] : out.terms) amp *= scale;
    return out;
}

PureState factor_out_photon(const PureState& state, PathId path, std::int64_t ell) {
    const Mode target{path, ell};
    PureState out;
    out.photons = state.photons - 1;
    for (const auto& [basis, amp] : state.terms) {
        const std::int64_t count = basis.count_at(target);
        if (count == 0)
            throw Error("factor_out_photon: photon not present in every term");
        if (count > 1)
            throw Error("factor_out_photon: mode is multiply occupied");
        std::vector<ModeCount> reduced;
        reduced.reserve(basis.occ.size() - 1);
        for (const auto& mc : basis.occ)
            if (!(mc.mode == target)) reduced.push_back(mc);
        add_term(out, BasisState{std::move(reduced)}, amp);
    }
    return out;
}

std::string basis_to_string(const BasisState& b) {
    std::string out;
    for (std::size_t i = 0; i < b.occ.size(); ++i) {
        if (i > 0) out += ';';
        out += std::to_string(b.occ[i].mode.path);
        out += ':';
        out += std::to_string(b.occ[i].mode.ell);
        out += ':';
        out += std::to_string(b.occ[i].count);
    }
    return out;
}

namespace {

std::int64_t parse_int(std::string_view field) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw SchemaError("basis_from_string: bad integer field '" + std::string(field) + "'");
    return value;
}

}  // namespace

BasisState basis_from_string(std::string_view text) {
    std::vector<ModeCount> modes;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(';', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view triple = text.substr(pos, end - pos);
        const std::size_t c1 = triple.find(':');
        const std::size_t c2 = c1 == std::string_view::npos
                                   ? std::string_view::npos
                                   : triple.find(':', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos)
            throw SchemaError("basis_from_string: expected path:ell:count triple");
        const std::int64_t path = parse_int(triple.substr(0, c1));
        const std::int64_t ell = parse_int(triple.substr(c1 + 1, c2 - c1 - 1));
        const std::int64_t count = parse_int(triple.substr(c2 + 1));
        modes.push_back({Mode{static_cast<PathId>(path), ell}, count});
        pos = end + 1;
    }
    return make_basis(std::move(modes));
}

}  // namespace oam
