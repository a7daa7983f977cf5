#include "pcwlab/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <string_view>

#include "pcwlab/error.hpp"
#include "pcwlab/io.hpp"
#include "pcwlab/rng.hpp"

namespace pcwlab {

namespace {

double shared_variate(std::uint64_t seed, std::int64_t customer_id) {
    KeyedStream s(seed, "eval", static_cast<std::uint64_t>(customer_id));
    return (static_cast<double>(s.next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

EvaluationTrace evaluate(std::span<const PricingPolicy* const> agents, const Dataset& test,
                         const ConversionCurve& true_model, const ActionGrid& grid,
                         const EvalOptions& options) {
    EvaluationTrace trace;
    for (const PricingPolicy* a : agents) trace.agents.push_back(a->name());

    std::vector<std::size_t> order(test.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (options.shuffle && order.size() > 1) {
        KeyedStream shuffle(options.seed, "eval.order", 0);
        for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[shuffle.below(i + 1)]);
    }

    const std::size_t n_agents = agents.size();
    trace.customer_ids.reserve(order.size());
    trace.u.reserve(order.size());
    trace.quotes.reserve(order.size() * n_agents);
    for (std::size_t idx : order) {
        const CustomerRecord& r = test.records[idx];
        const double u = shared_variate(options.seed, r.id);
        trace.customer_ids.push_back(r.id);
        trace.u.push_back(u);
        for (const PricingPolicy* agent : agents) {
            KeyedStream stream(options.seed, purpose_tag("agent." + agent->name()),
                               static_cast<std::uint64_t>(r.id));
            const std::size_t action = agent->quote(r, stream);
            if (!grid.contains(action)) {
                throw BoundsError("agent '" + agent->name() + "' quoted action " +
                                  std::to_string(action) + " outside the grid");
            }
            AgentQuote q;
            q.action = action;
            q.premium = premium_for(r, grid[action]);
            q.z = normalized_price(q.premium, r.avg_top5, r.avg_top6_10).z;
            q.p_true = true_model(q.z);
            const double margin = q.premium - r.burn_cost;
            q.expected_reward = q.p_true * margin;
            q.accepted = u <= q.p_true;
            q.realised_reward = q.accepted ? margin : 0.0;
            trace.quotes.push_back(q);
        }
    }
    return trace;
}

EvaluationTrace evaluate(std::span<const PricingPolicy* const> agents, const Dataset& test,
                         const ActionGrid& grid, const EvalOptions& options) {
    return evaluate(agents, test, ConversionCurve([](double z) { return true_conversion(z); }), grid,
                    options);
}

CumulativeCurves cumulative_curves(const EvaluationTrace& trace) {
    CumulativeCurves c;
    c.agents = trace.agents;
    const std::size_t n = trace.customers();
    c.expected.assign(trace.agents.size(), std::vector<double>(n));
    c.realised.assign(trace.agents.size(), std::vector<double>(n));
    for (std::size_t i = 0; i < trace.agents.size(); ++i) {
        double e = 0.0;
        double r = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            e += trace.at(t, i).expected_reward;
            r += trace.at(t, i).realised_reward;
            c.expected[i][t] = e;
            c.realised[i][t] = r;
        }
    }
    return c;
}

std::vector<SummaryRow> summarize(const EvaluationTrace& trace) {
    std::vector<SummaryRow> rows(trace.agents.size());
    const std::size_t n = trace.customers();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        SummaryRow& row = rows[i];
        row.agent = trace.agents[i];
        std::size_t accepted = 0;
        double accepted_premium = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const AgentQuote& q = trace.at(t, i);
            row.cum_expected += q.expected_reward;
            row.cum_realised += q.realised_reward;
            if (q.accepted) {
                ++accepted;
                accepted_premium += q.premium;
            }
        }
        row.acceptance_rate = n == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(n);
        row.avg_accepted_premium = accepted == 0 ? std::numeric_limits<double>::quiet_NaN()
                                                 : accepted_premium / static_cast<double>(accepted);
    }
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows[a].cum_expected > rows[b].cum_expected;
    });
    for (std::size_t r = 0; r < order.size(); ++r) rows[order[r]].rank = r + 1;
    return rows;
}

std::vector<std::string> rank_order(const std::vector<SummaryRow>& rows) {
    std::vector<std::string> names(rows.size());
    for (const auto& row : rows) names.at(row.rank - 1) = row.agent;
    return names;
}

std::string trace_csv(const EvaluationTrace& trace) {
    std::string out = "t,customer_id,u,agent,premium,z,p_true,expected_reward,realised_reward\n";
    for (std::size_t t = 0; t < trace.customers(); ++t) {
        for (std::size_t i = 0; i < trace.agents.size(); ++i) {
            const AgentQuote& q = trace.at(t, i);
            out += std::to_string(t + 1);
            out += ',';
            out += std::to_string(trace.customer_ids[t]);
            out += ',';
            io::append_g17(out, trace.u[t]);
            out += ',';
            out += trace.agents[i];
            for (double v : {q.premium, q.z, q.p_true, q.expected_reward, q.realised_reward}) {
                out += ',';
                io::append_g17(out, v);
            }
            out += '\n';
        }
    }
    return out;
}

std::string curves_csv(const CumulativeCurves& curves) {
    std::string out = "t,agent,cum_expected,cum_realised\n";
    const std::size_t n = curves.expected.empty() ? 0 : curves.expected.front().size();
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < curves.agents.size(); ++i) {
            out += std::to_string(t + 1);
            out += ',';
            out += curves.agents[i];
            out += ',';
            io::append_g17(out, curves.expected[i][t]);
            out += ',';
            io::append_g17(out, curves.realised[i][t]);
            out += '\n';
        }
    }
    return out;
}

CumulativeCurves curves_from_csv(const std::string& text) {
    CumulativeCurves c;
    std::map<std::string, std::size_t> index;
    std::string_view rest(text);
    bool header = true;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (line.empty()) continue;
        if (header) {
            if (line != "t,agent,cum_expected,cum_realised") throw ArtifactError("curves CSV: bad header");
            header = false;
            continue;
        }
        std::string_view cells[4];
        for (int k = 0; k < 4; ++k) {
            const auto comma = line.find(',');
            if ((comma == std::string_view::npos) != (k == 3)) throw ArtifactError("curves CSV: bad row");
            cells[k] = line.substr(0, comma);
            if (comma != std::string_view::npos) line.remove_prefix(comma + 1);
        }
        const std::string agent(cells[1]);
        auto it = index.find(agent);
        if (it == index.end()) {
            it = index.emplace(agent, c.agents.size()).first;
            c.agents.push_back(agent);
            c.expected.emplace_back();
            c.realised.emplace_back();
        }
        const auto t = static_cast<std::size_t>(io::parse_int(cells[0]));
        if (t != c.expected[it->second].size() + 1) throw ArtifactError("curves CSV: rows out of order");
        c.expected[it->second].push_back(io::parse_double(cells[2]));
        c.realised[it->second].push_back(io::parse_double(cells[3]));
    }
    if (header) throw ArtifactError("curves CSV: missing header");
    for (const auto& e : c.expected) {
        if (e.size() != c.expected.front().size()) throw ArtifactError("curves CSV: ragged agents");
    }
    return c;
}

std::string ranking_table(const std::vector<SummaryRow>& rows) {
    std::vector<const SummaryRow*> sorted;
    for (const auto& r : rows) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-22s %16s %16s %10s %14s\n", "rank", "agent",
                  "cum_expected", "cum_realised", "accept", "avg_accepted");
    out += line;
    for (const SummaryRow* r : sorted) {
        if (std::isnan(r->acceptance_rate)) {
            // rows rebuilt from curves alone carry no acceptance statistics
            std::snprintf(line, sizeof line, "%-4zu %-22s %16.2f %16.2f %10s %14s\n", r->rank, r->agent.c_str(),
                          r->cum_expected, r->cum_realised, "-", "-");
        } else {
            std::snprintf(line, sizeof line, "%-4zu %-22s %16.2f %16.2f %10.4f %14.2f\n", r->rank,
                          r->agent.c_str(), r->cum_expected, r->cum_realised, r->acceptance_rate,
                          r->avg_accepted_premium);
        }
        out += line;
    }
    return out;
}

}  // namespace pcwlab
