#include "rrf/features.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rrf/errors.hpp"
#include "rrf/random.hpp"
#include "rrf/text.hpp"

namespace rrf {

namespace {

// Rows are drawn in blocks; block b always uses substream b, so the draw does
// not depend on how blocks are scheduled.
constexpr int kRowsPerStream = 256;
constexpr std::uint64_t kPhaseStreamBase = 1ULL << 40;

template <typename RowFill>
Matrix fill_rows(int n, int cols, std::uint64_t seed, RowFill&& fill) {
    Matrix out(n, cols);
    const int blocks = (n + kRowsPerStream - 1) / kRowsPerStream;
    for (int b = 0; b < blocks; ++b) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(b));
        const int end = std::min(n, (b + 1) * kRowsPerStream);
        for (int i = b * kRowsPerStream; i < end; ++i) fill(out.row(i), rng);
    }
    return out;
}

template <typename Row>
void fill_unit_row(Row row, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double norm = 0.0;
    do {
        for (Eigen::Index k = 0; k < row.size(); ++k) row[k] = normal(rng);
        norm = row.norm();
    } while (norm == 0.0);
    row /= norm;
}

Matrix sample_unit_rows(int cols, int n, std::uint64_t seed) {
    return fill_rows(n, cols, seed, [](auto row, Rng& rng) { fill_unit_row(row, rng); });
}

Matrix sample_normal_rows(int cols, int n, double scale, std::uint64_t seed) {
    return fill_rows(n, cols, seed, [scale](auto row, Rng& rng) {
        std::normal_distribution<double> normal(0.0, scale);
        for (Eigen::Index k = 0; k < row.size(); ++k) row[k] = normal(rng);
    });
}

void require_positive_counts(int d, int n) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
}

void check_input(const Matrix& x, const FeatureBank& bank, FeatureKind expected) {
    if (bank.spec().kind != expected) {
        throw std::invalid_argument(std::string("bank holds ") + to_string(bank.spec().kind) +
                                    " features");
    }
    if (x.cols() != bank.input_dim()) {
        throw ShapeError("input has " + std::to_string(x.cols()) + " columns, bank expects " +
                         std::to_string(bank.input_dim()));
    }
}

std::string distribution_token(const FeatureDistribution& dist) {
    if (std::holds_alternative<UniformSphere>(dist)) return "uniform_sphere";
    if (const auto* g = std::get_if<Gaussian>(&dist)) return "gaussian:" + text::format_double(g->scale);
    std::string out = "ellipsoid";
    for (double a : std::get<Ellipsoid>(dist).axes) out += ":" + text::format_double(a);
    return out;
}

FeatureDistribution parse_distribution(std::string_view token) {
    const auto parts = text::split(token, ':');
    auto number = [](std::string_view s) {
        double v = 0.0;
        if (!text::parse_double(s, v)) throw ParseError("bad number '" + std::string(s) + "'", 1);
        return v;
    };
    if (parts[0] == "uniform_sphere" && parts.size() == 1) return UniformSphere{};
    if (parts[0] == "gaussian" && parts.size() == 2) return Gaussian{number(parts[1])};
    if (parts[0] == "ellipsoid" && parts.size() >= 2) {
        Ellipsoid e;
        for (std::size_t i = 1; i < parts.size(); ++i) e.axes.push_back(number(parts[i]));
        return e;
    }
    throw ParseError("unknown distribution '" + std::string(token) + "'", 1);
}

void write_row(std::ostream& out, const auto& row) {
    for (Eigen::Index k = 0; k < row.size(); ++k) {
        if (k) out << ',';
        out << text::format_double(row[k]);
    }
    out << '\n';
}

std::vector<double> read_row(std::istream& in, std::size_t line_no, std::size_t expected) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("unexpected end of bank dump", line_no);
    std::vector<double> vals;
    for (auto field : text::split(text::trim(line), ',')) {
        double v = 0.0;
        if (!text::parse_double(text::trim(field), v)) throw ParseError("bad number in bank dump", line_no);
        vals.push_back(v);
    }
    if (vals.size() != expected) throw ParseError("wrong field count in bank dump", line_no);
    return vals;
}

}  // namespace

const char* to_string(FeatureKind kind) { return kind == FeatureKind::relu ? "relu" : "fourier"; }

FeatureKind feature_kind_from_string(const std::string& name) {
    if (name == "relu") return FeatureKind::relu;
    if (name == "fourier") return FeatureKind::fourier;
    throw std::invalid_argument("unknown feature kind '" + name + "'");
}

void FeatureSpec::validate() const {
    if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
    if (count < 1) throw std::invalid_argument("feature count must be >= 1");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw std::invalid_argument("bandwidth must be > 0");
    if (const auto* g = std::get_if<Gaussian>(&distribution); g && !(g->scale > 0.0)) {
        throw std::invalid_argument("gaussian scale must be > 0");
    }
    if (const auto* e = std::get_if<Ellipsoid>(&distribution)) {
        if (static_cast<int>(e->axes.size()) != weight_dim()) {
            throw std::invalid_argument("ellipsoid needs " + std::to_string(weight_dim()) + " axes");
        }
        for (double a : e->axes) {
            if (!(a > 0.0)) throw std::invalid_argument("ellipsoid axes must be > 0");
        }
    }
}

Matrix sample_sphere(int d, int n, std::uint64_t seed) {
    require_positive_counts(d, n);
    return sample_unit_rows(d + 1, n, seed);
}

Matrix sample_gaussian(int d, int n, double scale, std::uint64_t seed) {
    require_positive_counts(d, n);
    if (!(scale > 0.0)) throw std::invalid_argument("gaussian scale must be > 0");
    return sample_normal_rows(d + 1, n, scale, seed);
}

Matrix sample_ellipsoid(const std::vector<double>& axes, int n, std::uint64_t seed) {
    require_positive_counts(static_cast<int>(axes.size()), n);
    for (double a : axes) {
        if (!(a > 0.0)) throw std::invalid_argument("ellipsoid axes must be > 0");
    }
    Matrix rows = sample_unit_rows(static_cast<int>(axes.size()), n, seed);
    const Eigen::Map<const RowVector> scale(axes.data(), static_cast<Eigen::Index>(axes.size()));
    rows.array().rowwise() *= scale.array();
    return rows;
}

FeatureBank FeatureBank::sample(const FeatureSpec& spec) {
    spec.validate();
    const int cols = spec.weight_dim();
    Matrix omegas = std::visit(
        [&](const auto& dist) -> Matrix {
            using T = std::decay_t<decltype(dist)>;
            if constexpr (std::is_same_v<T, UniformSphere>) {
                return sample_unit_rows(cols, spec.count, spec.seed);
            } else if constexpr (std::is_same_v<T, Gaussian>) {
                return sample_normal_rows(cols, spec.count, dist.scale, spec.seed);
            } else {
                return sample_ellipsoid(dist.axes, spec.count, spec.seed);
            }
        },
        spec.distribution);

    Vector phases;
    if (spec.kind == FeatureKind::fourier) {
        Matrix p = fill_rows(spec.count, 1, spec.seed ^ kPhaseStreamBase, [](auto row, Rng& rng) {
            std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
            row[0] = uniform(rng);
        });
        phases = p.col(0);
    }
    return FeatureBank(spec, std::move(omegas), std::move(phases));
}

FeatureBank::FeatureBank(FeatureSpec spec, Matrix omegas, Vector phases)
    : spec_(std::move(spec)), omegas_(std::move(omegas)), phases_(std::move(phases)) {
    spec_.validate();
    if (omegas_.rows() != spec_.count || omegas_.cols() != spec_.weight_dim()) {
        throw ShapeError("weight matrix must be " + std::to_string(spec_.count) + " x " +
                         std::to_string(spec_.weight_dim()));
    }
    const Eigen::Index want_phases = spec_.kind == FeatureKind::fourier ? spec_.count : 0;
    if (phases_.size() != want_phases) {
        throw ShapeError("phase vector must have " + std::to_string(want_phases) + " entries");
    }
}

double FeatureMatrix::zero_fraction() const {
    if (values.size() == 0) return 0.0;
    return static_cast<double>((values.array() == 0.0).count()) / static_cast<double>(values.size());
}

FeatureMatrix relu_features(const Matrix& x, const FeatureBank& bank) {
    check_input(x, bank, FeatureKind::relu);
    const int d = bank.input_dim();
    const auto& w = bank.omegas();
    Matrix values = x * w.leftCols(d).transpose();
    values.rowwise() += (w.col(d) / bank.spec().bandwidth).transpose();
    values = values.cwiseMax(0.0);
    return {std::move(values), bank.spec()};
}

FeatureMatrix fourier_features(const Matrix& x, const FeatureBank& bank) {
    check_input(x, bank, FeatureKind::fourier);
    Matrix values = x * bank.omegas().transpose() / bank.spec().bandwidth;
    values.rowwise() += bank.phases().transpose();
    values = std::numbers::sqrt2 * values.array().cos();
    return {std::move(values), bank.spec()};
}

FeatureMatrix compute_features(const Matrix& x, const FeatureBank& bank) {
    return bank.spec().kind == FeatureKind::relu ? relu_features(x, bank) : fourier_features(x, bank);
}

void write_bank(const FeatureBank& bank, std::ostream& out) {
    const auto& spec = bank.spec();
    out << "kind=" << to_string(spec.kind) << ",d=" << spec.input_dim << ",N=" << spec.count
        << ",gamma=" << text::format_double(spec.bandwidth) << ",seed=" << spec.seed
        << ",distribution=" << distribution_token(spec.distribution) << '\n';
    for (Eigen::Index i = 0; i < bank.omegas().rows(); ++i) write_row(out, bank.omegas().row(i));
    if (spec.kind == FeatureKind::fourier) write_row(out, bank.phases());
}

FeatureBank read_bank(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty bank dump", 1);
    FeatureSpec spec;
    bool seen_kind = false, seen_d = false, seen_n = false, seen_gamma = false;
    for (auto field : text::split(text::trim(header), ',')) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw ParseError("header field without '='", 1);
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        bool ok = true;
        if (key == "kind") {
            spec.kind = feature_kind_from_string(std::string(value));
            seen_kind = true;
        } else if (key == "d") {
            ok = text::parse_int(value, spec.input_dim);
            seen_d = true;
        } else if (key == "N") {
            ok = text::parse_int(value, spec.count);
            seen_n = true;
        } else if (key == "gamma") {
            ok = text::parse_double(value, spec.bandwidth);
            seen_gamma = true;
        } else if (key == "seed") {
            ok = text::parse_int(value, spec.seed);
        } else if (key == "distribution") {
            spec.distribution = parse_distribution(value);
        }
        if (!ok) throw ParseError("bad header value for '" + std::string(key) + "'", 1);
    }
    if (!(seen_kind && seen_d && seen_n && seen_gamma)) throw ParseError("incomplete bank header", 1);
    spec.validate();

    Matrix omegas(spec.count, spec.weight_dim());
    for (int i = 0; i < spec.count; ++i) {
        const auto row = read_row(in, static_cast<std::size_t>(i) + 2, static_cast<std::size_t>(spec.weight_dim()));
        for (int k = 0; k < spec.weight_dim(); ++k) omegas(i, k) = row[static_cast<std::size_t>(k)];
    }
    Vector phases;
    if (spec.kind == FeatureKind::fourier) {
        const auto row = read_row(in, static_cast<std::size_t>(spec.count) + 2, static_cast<std::size_t>(spec.count));
        phases = Eigen::Map<const Vector>(row.data(), spec.count);
    }
    return FeatureBank(spec, std::move(omegas), std::move(phases));
}

}  // namespace rrf
