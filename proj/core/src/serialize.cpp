#include "rrf/serialize.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rrf/errors.hpp"

namespace rrf {

namespace {

using json = nlohmann::ordered_json;

json matrix_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from(const json& j, const char* rows_key, const char* cols_key, const char* data_key) {
    const auto rows = j.at(rows_key).get<Eigen::Index>();
    const auto cols = j.at(cols_key).get<Eigen::Index>();
    const auto data = j.at(data_key).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ShapeError("matrix data length does not match shape");
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    return m;
}

Vector vector_from(const json& j) {
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

json layer_json(const Matrix& weights, const Vector& bias, const char* activation) {
    return json{{"rows", weights.rows()},
                {"cols", weights.cols()},
                {"weights", std::vector<double>(weights.data(), weights.data() + weights.size())},
                {"bias", to_std(bias)},
                {"activation", activation}};
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), 1);
    }
}

template <typename Fn>
auto guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed document: ") + e.what(), 1);
    }
}

}  // namespace

std::string to_json(const AtomicFunction& f) {
    json atoms = json::array();
    for (const auto& a : f.atoms()) atoms.push_back({{"coeff", a.coeff}, {"omega", to_std(a.omega)}});
    return json{{"kind", "atomic_function"}, {"input_dim", f.input_dim()}, {"atoms", atoms}}.dump();
}

AtomicFunction atomic_function_from_json(const std::string& text) {
    const json j = parse(text);
    return guarded([&] {
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms")) atoms.push_back({a.at("coeff").get<double>(), vector_from(a.at("omega"))});
        return AtomicFunction(j.at("input_dim").get<int>(), std::move(atoms));
    });
}

std::string to_json(const AssembledNet& net) {
    json layers = json::array();
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        layers.push_back(layer_json(net.layers[i].weights, net.layers[i].bias, i + 1 < net.layers.size() ? "relu" : "linear"));
    }
    return json{{"kind", "assembled_net"},
                {"layers", layers},
                {"atoms_per_component", net.atoms_per_component},
                {"hidden_widths", net.hidden_widths},
                {"rescale", net.rescale}}
        .dump();
}

AssembledNet assembled_net_from_json(const std::string& text) {
    const json j = parse(text);
    return guarded([&] {
        AssembledNet net;
        for (const auto& l : j.at("layers")) net.layers.push_back({matrix_from(l, "rows", "cols", "weights"), vector_from(l.at("bias"))});
        net.atoms_per_component = j.at("atoms_per_component").get<std::vector<long>>();
        net.hidden_widths = j.at("hidden_widths").get<std::vector<long>>();
        net.rescale = j.at("rescale").get<double>();
        return net;
    });
}

std::string to_json(const DenseNet& net) {
    json layers = json::array();
    for (int l = 0; l < net.depth(); ++l) {
        const auto ul = static_cast<std::size_t>(l);
        layers.push_back(layer_json(net.weights()[ul], net.biases()[ul], l + 1 < net.depth() ? "relu" : "linear"));
    }
    return json{{"kind", "dense_net"}, {"layers", layers}}.dump();
}

DenseNet dense_net_from_json(const std::string& text) {
    const json j = parse(text);
    return guarded([&] {
        std::vector<Matrix> weights;
        std::vector<Vector> biases;
        for (const auto& l : j.at("layers")) {
            weights.push_back(matrix_from(l, "rows", "cols", "weights"));
            biases.push_back(vector_from(l.at("bias")));
        }
        return DenseNet(std::move(weights), std::move(biases));
    });
}

std::string to_json(const RandomFeatureModel& model) {
    const auto& bank = model.bank;
    const auto& spec = bank.spec();
    const int d = spec.input_dim;
    json layers = json::array();
    if (spec.kind == FeatureKind::relu) {
        layers.push_back(layer_json(bank.omegas().leftCols(d), bank.omegas().col(d) / spec.bandwidth, "relu"));
    } else {
        layers.push_back(layer_json(bank.omegas() / spec.bandwidth, bank.phases(), "sqrt2_cos"));
    }
    layers.push_back(layer_json(model.outer.transpose(), Vector::Zero(model.outer.cols()), "linear"));

    std::ostringstream dump;
    write_bank(bank, dump);
    return json{{"kind", "random_feature_model"},
                {"layers", layers},
                {"radius", model.radius},
                {"outer", matrix_json(model.outer)},
                {"bank", dump.str()}}
        .dump();
}

RandomFeatureModel random_feature_model_from_json(const std::string& text) {
    const json j = parse(text);
    return guarded([&] {
        std::istringstream dump(j.at("bank").get<std::string>());
        FeatureBank bank = read_bank(dump);
        Matrix outer = matrix_from(j.at("outer"), "rows", "cols", "data");
        if (outer.rows() != bank.count()) throw ShapeError("outer weights do not match the bank");
        return RandomFeatureModel{std::move(bank), std::move(outer), j.at("radius").get<double>()};
    });
}

}  // namespace rrf
