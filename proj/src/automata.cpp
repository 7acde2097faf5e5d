#include "ovfit/automata.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "ovfit/error.hpp"

namespace ovfit {

namespace {

[[noreturn]] void fail_line(std::size_t lineno, const std::string& msg) {
    throw Error("automaton line " + std::to_string(lineno) + ": " + msg);
}

std::uint64_t parse_u64(const std::string& tok, std::size_t lineno, const char* what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail_line(lineno, std::string("expected ") + what + ", got '" + tok + "'");
    return v;
}

std::int64_t parse_i64(const std::string& tok, std::size_t lineno, const char* what) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail_line(lineno, std::string("expected ") + what + ", got '" + tok + "'");
    return v;
}

std::int64_t effective_score_cap(const ParseOptions& opts) {
    if (opts.max_abs_score < 0) throw Error("max_abs_score must be non-negative");
    return std::min<std::int64_t>(opts.max_abs_score, std::numeric_limits<std::int32_t>::max());
}

void sort_unique(std::vector<std::uint32_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Structural checks shared by the parser and densify. The parser catches the
// line-local violations itself so errors carry line numbers; this backstop
// covers cross-line constraints and programmatically built automata.
void validate(const Automaton& a) {
    auto check_id = [&](std::uint32_t id, const char* role) {
        if (id >= a.num_states)
            throw Error(std::string(role) + " state id " + std::to_string(id) +
                        " out of range (states " + std::to_string(a.num_states) + ")");
    };
    for (const auto id : a.start_states) check_id(id, "start");
    for (const auto id : a.accept_states) check_id(id, "accept");
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& e : a.edges) {
        check_id(e.source, "edge source");
        check_id(e.target, "edge target");
        if (!seen.insert({e.source, e.target}).second)
            throw Error("duplicate edge (" + std::to_string(e.source) + ", " +
                        std::to_string(e.target) + ")");
    }
    std::vector<bool> is_start(a.num_states, false), is_accept(a.num_states, false);
    for (const auto id : a.start_states) is_start[id] = true;
    for (const auto id : a.accept_states) is_accept[id] = true;
    for (const auto& e : a.edges) {
        if (is_accept[e.source] && is_start[e.target])
            throw Error("edge from accept state " + std::to_string(e.source) + " to start state " +
                        std::to_string(e.target) + " (accept states must not feed starts)");
    }
}

}  // namespace

Automaton parse_automaton(const std::string& text, const ParseOptions& opts) {
    const std::int64_t score_cap = effective_score_cap(opts);
    Automaton a;
    bool have_states = false;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen_edges;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string word;
        if (!(ls >> word)) continue;
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(std::move(t));

        if (word == "states") {
            if (have_states) fail_line(lineno, "duplicate states line");
            if (toks.size() != 1) fail_line(lineno, "states takes exactly one count");
            const std::uint64_t n = parse_u64(toks[0], lineno, "state count");
            if (n > std::numeric_limits<std::uint32_t>::max())
                fail_line(lineno, "state count too large");
            a.num_states = static_cast<std::uint32_t>(n);
            have_states = true;
        } else if (word == "start" || word == "accept") {
            if (!have_states) fail_line(lineno, "states line must come before '" + word + "'");
            if (toks.empty()) fail_line(lineno, word + " needs at least one state id");
            auto& dst = (word == "start") ? a.start_states : a.accept_states;
            for (const auto& tok : toks) {
                const std::uint64_t id = parse_u64(tok, lineno, "state id");
                if (id >= a.num_states)
                    fail_line(lineno, "state id " + tok + " out of range (states " +
                                          std::to_string(a.num_states) + ")");
                dst.push_back(static_cast<std::uint32_t>(id));
            }
        } else if (word == "edge") {
            if (!have_states) fail_line(lineno, "states line must come before 'edge'");
            if (toks.size() != 2 && toks.size() != 3)
                fail_line(lineno, "edge takes 'src dst [score]'");
            const std::uint64_t src = parse_u64(toks[0], lineno, "source state id");
            const std::uint64_t dst = parse_u64(toks[1], lineno, "target state id");
            for (const std::uint64_t id : {src, dst}) {
                if (id >= a.num_states)
                    fail_line(lineno, "state id " + std::to_string(id) + " out of range (states " +
                                          std::to_string(a.num_states) + ")");
            }
            std::int64_t score = 0;
            if (toks.size() == 3) {
                score = parse_i64(toks[2], lineno, "edge score");
                if (score < -score_cap || score > score_cap)
                    fail_line(lineno, "edge score " + toks[2] + " outside +/-" +
                                          std::to_string(score_cap));
            }
            const auto s32 = static_cast<std::uint32_t>(src);
            const auto d32 = static_cast<std::uint32_t>(dst);
            if (!seen_edges.insert({s32, d32}).second)
                fail_line(lineno, "duplicate edge (" + toks[0] + ", " + toks[1] + ")");
            a.edges.push_back({s32, d32, static_cast<std::int32_t>(score)});
        } else {
            fail_line(lineno, "unknown directive '" + word + "'");
        }
    }
    if (!have_states) throw Error("automaton: missing states line");
    sort_unique(a.start_states);
    sort_unique(a.accept_states);
    validate(a);
    return a;
}

std::string serialize_automaton(const Automaton& a) {
    std::ostringstream out;
    out << "states " << a.num_states << "\n";
    if (!a.start_states.empty()) {
        out << "start";
        for (const auto id : a.start_states) out << ' ' << id;
        out << "\n";
    }
    if (!a.accept_states.empty()) {
        out << "accept";
        for (const auto id : a.accept_states) out << ' ' << id;
        out << "\n";
    }
    for (const auto& e : a.edges) out << "edge " << e.source << ' ' << e.target << ' ' << e.score << "\n";
    return out.str();
}

FeatureVector extract_features(const Automaton& a) {
    FeatureVector f;
    f.num_states = a.num_states;
    f.num_edges = a.edges.size();
    std::vector<std::uint64_t> fan_out(a.num_states, 0), fan_in(a.num_states, 0);
    for (const auto& e : a.edges) {
        ++fan_out[e.source];
        ++fan_in[e.target];
    }
    for (std::uint32_t s = 0; s < a.num_states; ++s) {
        f.max_fan_out = std::max(f.max_fan_out, fan_out[s]);
        f.max_fan_in = std::max(f.max_fan_in, fan_in[s]);
    }
    f.avg_fan_out = a.num_states == 0
                        ? 0.0
                        : static_cast<double>(f.num_edges) / static_cast<double>(f.num_states);
    return f;
}

DensifyResult densify(const SparseAutomaton& sparse, const ParseOptions& opts) {
    const std::int64_t score_cap = effective_score_cap(opts);
    std::set<std::uint64_t> ids;
    for (const auto& e : sparse.edges) {
        ids.insert(e.source);
        ids.insert(e.target);
    }
    ids.insert(sparse.start_states.begin(), sparse.start_states.end());
    ids.insert(sparse.accept_states.begin(), sparse.accept_states.end());
    if (ids.size() > std::numeric_limits<std::uint32_t>::max())
        throw Error("too many states to densify");

    DensifyResult r;
    std::map<std::uint64_t, std::uint32_t> to_new;
    for (const auto id : ids) {
        to_new.emplace(id, static_cast<std::uint32_t>(r.original_ids.size()));
        r.original_ids.push_back(id);
    }
    r.automaton.num_states = static_cast<std::uint32_t>(ids.size());
    for (const auto& e : sparse.edges) {
        if (e.score < -score_cap || e.score > score_cap)
            throw Error("edge score " + std::to_string(e.score) + " outside +/-" +
                        std::to_string(score_cap));
        r.automaton.edges.push_back(
            {to_new.at(e.source), to_new.at(e.target), static_cast<std::int32_t>(e.score)});
    }
    for (const auto id : sparse.start_states) r.automaton.start_states.push_back(to_new.at(id));
    for (const auto id : sparse.accept_states) r.automaton.accept_states.push_back(to_new.at(id));
    sort_unique(r.automaton.start_states);
    sort_unique(r.automaton.accept_states);
    validate(r.automaton);
    return r;
}

}  // namespace ovfit
