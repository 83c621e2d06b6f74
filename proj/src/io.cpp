#include "bandchol/io.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>
#include <vector>

namespace bandchol {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

MatrixXd read_matrix_csv(std::istream& in, bool header) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (header && line_no == 1) continue;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            const std::string t = trim(cell);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
                throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                                 ": cannot parse '" + t + "' as a finite number");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(rows.front().size()) +
                             " fields, found " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("no data rows");
    MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

MatrixXd read_matrix_csv(const std::string& path, bool header) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return read_matrix_csv(in, header);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string format_real(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

void write_matrix_csv(std::ostream& out, const MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_real(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::string& path, const MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    write_matrix_csv(out, m);
}

namespace {

// Field access with path-qualified error messages.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InputError(path_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string at(const char* key) const { return path_ + "." + key; }
    const json& raw(const char* key) const { return j_.at(key); }

    double number(const char* key, std::optional<double> fallback = std::nullopt) const {
        if (!j_.contains(key)) {
            if (fallback) return *fallback;
            throw InputError(at(key) + ": required field missing");
        }
        if (!j_.at(key).is_number()) throw InputError(at(key) + ": expected a number");
        return j_.at(key).get<double>();
    }

    std::int64_t integer(const char* key, std::optional<std::int64_t> fallback = std::nullopt) const {
        if (!j_.contains(key)) {
            if (fallback) return *fallback;
            throw InputError(at(key) + ": required field missing");
        }
        if (!j_.at(key).is_number_integer()) throw InputError(at(key) + ": expected an integer");
        return j_.at(key).get<std::int64_t>();
    }

    std::string string(const char* key) const {
        if (!j_.contains(key)) throw InputError(at(key) + ": required field missing");
        if (!j_.at(key).is_string()) throw InputError(at(key) + ": expected a string");
        return j_.at(key).get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
};

// Prefixes errors with the field path. Messages that already start with a
// relative field name ("truth.rho: ...") are joined with '.'.
template <typename Fn>
void rethrow_with_path(const std::string& path, Fn&& fn, bool relative_field = false) {
    try {
        fn();
    } catch (const InputError& e) {
        const std::string what = e.what();
        if (what.rfind("config", 0) == 0) throw;
        throw InputError(path + (relative_field ? "." : ": ") + what);
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
    const Reader root(j, "config");
    ExperimentConfig c;

    const Reader truth(root.has("truth") ? root.raw("truth") : throw InputError("config.truth: required field missing"),
                       "config.truth");
    const std::string model = truth.string("model");
    const std::int64_t p = root.integer("p");
    if (p < 2) throw InputError("config.p: must be at least 2");
    c.truth.p = p;
    if (model == "ar1") {
        c.truth.variant = Ar1Model{truth.number("rho", 0.3)};
    } else if (model == "ar4") {
        Ar4Model m;
        if (truth.has("coefficients")) {
            const json& arr = truth.raw("coefficients");
            if (!arr.is_array() || arr.size() != 4)
                throw InputError("config.truth.coefficients: expected an array of 4 numbers");
            for (std::size_t i = 0; i < 4; ++i) {
                if (!arr[i].is_number())
                    throw InputError("config.truth.coefficients[" + std::to_string(i) + "]: expected a number");
                m.coefficients[i] = arr[i].get<double>();
            }
        }
        c.truth.variant = m;
    } else if (model == "fgn") {
        c.truth.variant = FgnModel{truth.number("hurst", 0.7)};
    } else {
        throw InputError("config.truth.model: expected one of ar1, ar4, fgn");
    }
    rethrow_with_path("config", [&] { c.truth.validate(); }, true);

    c.n = root.integer("n");
    const std::int64_t reps = root.integer("reps", 100);
    if (reps < 1) throw InputError("config.reps: must be at least 1");
    c.reps = static_cast<std::size_t>(reps);
    if (root.has("seed")) {
        if (!root.raw("seed").is_number_unsigned()) throw InputError("config.seed: expected a nonnegative integer");
        c.seed = root.raw("seed").get<std::uint64_t>();
    }
    c.kmax = root.integer("kmax", 20);
    if (root.has("center")) {
        if (!root.raw("center").is_boolean()) throw InputError("config.center: expected a boolean");
        c.center = root.raw("center").get<bool>();
    }

    auto string_list = [&](const char* key, auto parse, auto& out) {
        if (!root.has(key)) return;
        const json& arr = root.raw(key);
        if (!arr.is_array()) throw InputError(root.at(key) + ": expected an array");
        out.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = root.at(key) + "[" + std::to_string(i) + "]";
            if (!arr[i].is_string()) throw InputError(where + ": expected a string");
            rethrow_with_path(where, [&] { out.push_back(parse(arr[i].get<std::string>())); });
        }
    };
    string_list("estimators", parse_estimator, c.estimators);
    string_list("losses", parse_norm, c.losses);

    if (root.has("prior")) {
        const Reader prior(root.raw("prior"), "config.prior");
        c.prior.M = prior.number("M", c.prior.M);
        c.prior.nu0 = prior.number("nu0", c.prior.nu0);
    }
    if (root.has("resampling")) {
        const Reader rs(root.raw("resampling"), "config.resampling");
        const std::int64_t splits = rs.integer("splits", 50);
        if (splits < 1) throw InputError("config.resampling.splits: must be at least 1");
        c.resampling.splits = static_cast<std::size_t>(splits);
        c.resampling.reference_k = rs.integer("reference_k", 20);
    }
    rethrow_with_path("config", [&] { c.validate(); }, true);
    return c;
}

json to_json(const ExperimentConfig& c) {
    json truth{{"model", c.truth.name()}};
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Ar1Model>) truth["rho"] = m.rho;
            else if constexpr (std::is_same_v<T, Ar4Model>) truth["coefficients"] = m.coefficients;
            else truth["hurst"] = m.hurst;
        },
        c.truth.variant);
    json estimators = json::array();
    for (Estimator e : c.estimators) estimators.push_back(std::string(estimator_name(e)));
    json losses = json::array();
    for (Norm l : c.losses) losses.push_back(std::string(norm_name(l)));
    return json{{"truth", truth},
                {"n", c.n},
                {"p", c.truth.p},
                {"reps", c.reps},
                {"seed", c.seed},
                {"estimators", estimators},
                {"losses", losses},
                {"kmax", c.kmax},
                {"center", c.center},
                {"prior", {{"M", c.prior.M}, {"nu0", c.prior.nu0}}},
                {"resampling", {{"splits", c.resampling.splits}, {"reference_k", c.resampling.reference_k}}}};
}

void write_reps_csv(std::ostream& out, const ExperimentResult& result, bool include_timings) {
    const ExperimentConfig& c = result.config;
    out << "rep,k_hat,k_bl";
    for (Estimator e : c.estimators)
        for (Norm l : c.losses) out << ',' << estimator_name(e) << '_' << norm_name(l);
    if (include_timings) out << ",seconds";
    out << ",error\n";
    for (const RepResult& r : result.reps) {
        out << r.rep << ',' << r.k_hat << ',' << r.k_bl;
        for (Estimator e : c.estimators)
            for (Norm l : c.losses) {
                out << ',';
                if (!r.error) out << format_real(r.losses.at(e).at(l));
            }
        if (include_timings) out << ',' << format_real(r.seconds);
        out << ',';
        if (r.error) {
            std::string msg = *r.error;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            out << msg;
        }
        out << '\n';
    }
}

json summary_json(const ExperimentResult& result) {
    json table = json::object();
    for (const auto& [e, per_loss] : result.summary) {
        json row = json::object();
        for (const auto& [l, s] : per_loss) row[std::string(norm_name(l))] = {{"mean", s.mean}, {"sd", s.sd}};
        table[std::string(estimator_name(e))] = row;
    }
    return json{{"config", to_json(result.config)},
                {"failures", result.failures},
                {"summary", table}};
}

}  // namespace bandchol
