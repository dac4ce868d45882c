#include "wearlab/cohortstats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wearlab/csv.hpp"
#include "wearlab/parallel.hpp"

namespace wearlab::cohortstats {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi2_sf_1df(double x) {
    if (x <= 0) return 1.0;
    return std::erfc(std::sqrt(x / 2.0));
}

double pearson(const std::vector<double>& f1, const std::vector<double>& f2) {
    if (f1.size() != f2.size()) throw DomainError("pearson: length mismatch");
    std::vector<double> xs, ys;
    xs.reserve(f1.size());
    ys.reserve(f1.size());
    for (size_t i = 0; i < f1.size(); ++i) {
        if (!is_missing(f1[i]) && !is_missing(f2[i])) {
            xs.push_back(f1[i]);
            ys.push_back(f2[i]);
        }
    }
    const size_t n = xs.size();
    if (n < 2) return kMissing;
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0 || syy <= 0) return kMissing;
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const featgen::CohortMatrix& m, int threads) {
    const size_t d = featgen::kFeatureCount;
    const size_t n = m.rows.size();
    CorrelationMatrix cm;
    cm.ids.resize(d);
    std::iota(cm.ids.begin(), cm.ids.end(), 1);
    cm.rho.assign(d * d, kMissing);

    std::vector<std::vector<double>> cols(d, std::vector<double>(n));
    for (size_t j = 0; j < d; ++j) {
        for (size_t r = 0; r < n; ++r) cols[j][r] = m.rows[r].values[j];
    }
    parallel_for(d, threads, [&](size_t i) {
        for (size_t j = i; j < d; ++j) {
            double r = pearson(cols[i], cols[j]);
            if (i == j && !is_missing(r)) r = 1.0;
            cm.rho[i * d + j] = r;
            cm.rho[j * d + i] = r;
        }
    });
    return cm;
}

std::vector<StrongPair> strong_pairs(const CorrelationMatrix& cm, double threshold) {
    if (!(threshold > 0 && threshold <= 1)) {
        throw DomainError("strong_pairs: threshold must be in (0, 1]");
    }
    std::vector<StrongPair> out;
    const size_t d = cm.size();
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = i + 1; j < d; ++j) {
            const double r = cm.at(i, j);
            if (!is_missing(r) && std::fabs(r) > threshold) {
                out.push_back({cm.ids[i], cm.ids[j], r});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const StrongPair& a, const StrongPair& b) {
        return std::fabs(a.rho) > std::fabs(b.rho);
    });
    return out;
}

namespace {

// Average ranks with ties for the pooled sample.
std::vector<double> average_ranks(const std::vector<double>& pooled) {
    const size_t n = pooled.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double u_statistic(const std::vector<double>& pooled, size_t na) {
    const auto ranks = average_ranks(pooled);
    double ra = 0;
    for (size_t i = 0; i < na; ++i) ra += ranks[i];
    return ra - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;
}

}  // namespace

RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw DomainError("rank_sum_test: both samples must be non-empty");
    const size_t na = a.size(), nb = b.size(), n = na + nb;
    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());

    RankSumResult res;
    res.u = u_statistic(pooled, na);
    const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;

    if (n <= 12) {
        // Exhaustive two-sided p over all C(n, na) group assignments.
        res.exact = true;
        std::vector<double> sorted = pooled;
        std::sort(sorted.begin(), sorted.end());
        const double observed = std::fabs(res.u - mu);
        long extreme = 0, total = 0;
        std::vector<size_t> comb(na);
        std::iota(comb.begin(), comb.end(), size_t{0});
        while (true) {
            std::vector<double> assigned;
            assigned.reserve(n);
            std::vector<bool> in_a(n, false);
            for (size_t idx : comb) in_a[idx] = true;
            for (size_t i = 0; i < n; ++i) {
                if (in_a[i]) assigned.push_back(sorted[i]);
            }
            for (size_t i = 0; i < n; ++i) {
                if (!in_a[i]) assigned.push_back(sorted[i]);
            }
            const double u = u_statistic(assigned, na);
            ++total;
            if (std::fabs(u - mu) >= observed - 1e-12) ++extreme;
            // next combination
            size_t k = na;
            while (k > 0 && comb[k - 1] == n - na + k - 1) --k;
            if (k == 0) break;
            ++comb[k - 1];
            for (size_t j = k; j < na; ++j) comb[j] = comb[j - 1] + 1;
        }
        res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        return res;
    }

    // Normal approximation with tie and continuity corrections.
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double nf = static_cast<double>(n);
    const double var = (static_cast<double>(na) * static_cast<double>(nb) / 12.0) *
                       ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if (var <= 0) {
        res.p_value = 1.0;  // complete ties
        return res;
    }
    const double diff = res.u - mu;
    const double cc = diff > 0 ? -0.5 : (diff < 0 ? 0.5 : 0.0);
    const double z = (diff + cc) / std::sqrt(var);
    res.p_value = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    return res;
}

ChiSquareResult chi_square_test(const std::array<std::array<double, 2>, 2>& t) {
    const double a = t[0][0], b = t[0][1], c = t[1][0], d = t[1][1];
    if (a < 0 || b < 0 || c < 0 || d < 0) throw DomainError("chi_square_test: negative count");
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0) {
        throw DomainError("chi_square_test: zero margin");
    }
    const double n = r1 + r2;
    ChiSquareResult res;
    res.chi2 = n * (a * d - b * c) * (a * d - b * c) / (r1 * r2 * c1 * c2);
    res.p_value = chi2_sf_1df(res.chi2);
    return res;
}

std::vector<double> bh_fdr(const std::vector<double>& p_values) {
    const size_t m = p_values.size();
    for (double p : p_values) {
        if (!(p >= 0 && p <= 1)) throw DomainError("bh_fdr: p-values must lie in [0, 1]");
    }
    if (m == 0) return {};
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m);
    double running = 1.0;
    for (size_t k = m; k-- > 0;) {
        const double candidate =
            p_values[order[k]] * static_cast<double>(m) / static_cast<double>(k + 1);
        running = std::min(running, std::min(1.0, candidate));
        // m/j >= 1 guarantees adjusted >= raw in real arithmetic; clamp so
        // rounding cannot dip a hair below the raw p.
        adjusted[order[k]] = std::max(running, p_values[order[k]]);
    }
    return adjusted;
}

namespace {

struct GroupedValues {
    std::vector<double> pos, neg, all;
};

GroupedValues split_feature(const featgen::CohortMatrix& m, int feature_id) {
    GroupedValues g;
    for (size_t r = 0; r < m.rows.size(); ++r) {
        const double v = m.rows[r].values[feature_id - 1];
        if (is_missing(v)) continue;
        g.all.push_back(v);
        if (m.labels[r] == ingest::Label::lost_ge_2pct) {
            g.pos.push_back(v);
        } else {
            g.neg.push_back(v);
        }
    }
    return g;
}

void fill_moments(GroupTestResult& row, const GroupedValues& g) {
    const auto all = featgen::descriptive_stats(g.all);
    const auto pos = featgen::descriptive_stats(g.pos);
    const auto neg = featgen::descriptive_stats(g.neg);
    row.total_mean = all.mean;
    row.total_std = all.std_dev;
    row.pos_mean = pos.mean;
    row.pos_std = pos.std_dev;
    row.neg_mean = neg.mean;
    row.neg_std = neg.std_dev;
    row.n_total = static_cast<int>(g.all.size());
    row.n_pos = static_cast<int>(g.pos.size());
    row.n_neg = static_cast<int>(g.neg.size());
}

void apply_bh(std::vector<GroupTestResult>& rows) {
    std::vector<double> ps;
    ps.reserve(rows.size());
    for (const auto& r : rows) ps.push_back(r.p_value);
    const auto adj = bh_fdr(ps);
    for (size_t i = 0; i < rows.size(); ++i) rows[i].adjusted_p = adj[i];
}

}  // namespace

std::vector<GroupTestResult> group_summary_table(const featgen::CohortMatrix& m,
                                                 const std::vector<int>& feature_ids) {
    bool has_pos = false, has_neg = false;
    for (auto l : m.labels) {
        has_pos = has_pos || l == ingest::Label::lost_ge_2pct;
        has_neg = has_neg || l == ingest::Label::lost_lt_2pct;
    }
    if (!has_pos || !has_neg) {
        throw DomainError("group_summary_table: both classes must be present");
    }
    std::vector<GroupTestResult> rows;
    rows.reserve(feature_ids.size());
    for (int id : feature_ids) {
        GroupTestResult row;
        row.feature = featgen::FeatureRegistry::instance().entry(id).name;
        row.feature_id = id;
        const auto g = split_feature(m, id);
        fill_moments(row, g);
        if (!g.pos.empty() && !g.neg.empty()) {
            const auto rs = rank_sum_test(g.pos, g.neg);
            row.statistic = rs.u;
            row.p_value = rs.p_value;
        } else {
            row.statistic = kMissing;
            row.p_value = 1.0;
        }
        rows.push_back(std::move(row));
    }
    apply_bh(rows);
    return rows;
}

std::vector<GroupTestResult> group_summary_with_demographics(
    const featgen::CohortMatrix& m, const std::vector<ingest::SubjectMeta>& metas,
    const std::vector<int>& feature_ids) {
    if (metas.size() != m.rows.size()) {
        throw DomainError("group_summary_with_demographics: metas/rows size mismatch");
    }
    std::vector<GroupTestResult> rows;

    {
        GroupTestResult age;
        age.feature = "age";
        GroupedValues g;
        for (size_t i = 0; i < metas.size(); ++i) {
            const double v = metas[i].age;
            g.all.push_back(v);
            (m.labels[i] == ingest::Label::lost_ge_2pct ? g.pos : g.neg).push_back(v);
        }
        fill_moments(age, g);
        const auto rs = rank_sum_test(g.pos, g.neg);
        age.statistic = rs.u;
        age.p_value = rs.p_value;
        rows.push_back(std::move(age));
    }
    {
        GroupTestResult sex;
        sex.feature = "sex (% women)";
        std::array<std::array<double, 2>, 2> table{{{0, 0}, {0, 0}}};
        int women_pos = 0, women_neg = 0, n_pos = 0, n_neg = 0;
        for (size_t i = 0; i < metas.size(); ++i) {
            const bool pos = m.labels[i] == ingest::Label::lost_ge_2pct;
            const bool woman = metas[i].sex == ingest::Sex::female;
            table[pos ? 0 : 1][woman ? 0 : 1] += 1;
            if (pos) {
                ++n_pos;
                women_pos += woman;
            } else {
                ++n_neg;
                women_neg += woman;
            }
        }
        const auto cs = chi_square_test(table);
        sex.statistic = cs.chi2;
        sex.p_value = cs.p_value;
        sex.n_total = n_pos + n_neg;
        sex.n_pos = n_pos;
        sex.n_neg = n_neg;
        sex.total_mean = 100.0 * (women_pos + women_neg) / std::max(1, n_pos + n_neg);
        sex.pos_mean = n_pos ? 100.0 * women_pos / n_pos : kMissing;
        sex.neg_mean = n_neg ? 100.0 * women_neg / n_neg : kMissing;
        rows.push_back(std::move(sex));
    }

    auto feature_rows = group_summary_table(m, feature_ids);
    // Re-adjust over the whole rendered family (demographics + features).
    rows.insert(rows.end(), feature_rows.begin(), feature_rows.end());
    apply_bh(rows);
    return rows;
}

std::string render_summary_table(const std::vector<GroupTestResult>& rows) {
    std::ostringstream out;
    auto cell = [](double mean, double sd) {
        std::ostringstream s;
        if (is_missing(mean)) return std::string("-");
        s.setf(std::ios::fixed);
        s.precision(2);
        s << mean;
        if (!is_missing(sd)) s << " +/- " << sd;
        return s.str();
    };
    out << "feature | total | loss >= 2% | loss < 2% | p | adjusted p\n";
    for (const auto& r : rows) {
        std::ostringstream p, ap;
        p.precision(4);
        ap.precision(4);
        p << r.p_value;
        ap << r.adjusted_p;
        out << r.feature << " | " << cell(r.total_mean, r.total_std) << " | "
            << cell(r.pos_mean, r.pos_std) << " | " << cell(r.neg_mean, r.neg_std) << " | "
            << p.str() << " | " << ap.str() << '\n';
    }
    return out.str();
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

nlohmann::ordered_json opt_json(double v) {
    if (is_missing(v)) return nullptr;
    return v;
}

}  // namespace

void write_corr_csv(const std::string& path, const CorrelationMatrix& cm) {
    std::ostringstream out;
    out << "id";
    for (int id : cm.ids) out << ',' << id;
    out << '\n';
    const size_t d = cm.size();
    for (size_t i = 0; i < d; ++i) {
        out << cm.ids[i];
        for (size_t j = 0; j < d; ++j) {
            out << ',';
            const double r = cm.at(i, j);
            if (!is_missing(r)) out << fmt_double(r);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_strong_pairs_csv(const std::string& path, const std::vector<StrongPair>& pairs) {
    std::ostringstream out;
    out << "i,j,rho\n";
    for (const auto& p : pairs) {
        out << p.id_a << ',' << p.id_b << ',' << fmt_double(p.rho) << '\n';
    }
    write_text_file(path, out.str());
}

void write_summary_json(const std::string& path, const std::vector<GroupTestResult>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json item;
        item["feature"] = r.feature;
        if (r.feature_id > 0) item["feature_id"] = r.feature_id;
        item["statistic"] = opt_json(r.statistic);
        item["p_value"] = r.p_value;
        item["adjusted_p"] = r.adjusted_p;
        item["n"] = {{"total", r.n_total}, {"pos", r.n_pos}, {"neg", r.n_neg}};
        item["total"] = {{"mean", opt_json(r.total_mean)}, {"std", opt_json(r.total_std)}};
        item["lost_ge_2pct"] = {{"mean", opt_json(r.pos_mean)}, {"std", opt_json(r.pos_std)}};
        item["lost_lt_2pct"] = {{"mean", opt_json(r.neg_mean)}, {"std", opt_json(r.neg_std)}};
        arr.push_back(std::move(item));
    }
    write_text_file(path, arr.dump(2) + "\n");
}

}  // namespace wearlab::cohortstats
