#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "detector.hpp"
#include "mnnet.hpp"
#include "network.hpp"

// Versioned line-oriented text formats.  Values are written with 17
// significant digits, so a load(store(x)) round trip reproduces forward
// passes bit for bit.

namespace mimovq {

namespace detail {

inline void write_values(std::ostream& os, const char* tag, const std::vector<double>& v) {
    os << tag;
    char buf[40];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, " %.17g", x);
        os << buf;
    }
    os << '\n';
}

inline void expect_token(std::istream& is, const std::string& expected, const char* context) {
    std::string tok;
    if (!(is >> tok) || tok != expected)
        throw std::runtime_error(std::string(context) + ": expected '" + expected + "', got '" + tok + "'");
}

inline void read_values(std::istream& is, const std::string& tag, std::vector<double>& v,
                        const char* context) {
    expect_token(is, tag, context);
    for (double& x : v)
        if (!(is >> x)) throw std::runtime_error(std::string(context) + ": truncated value block");
}

}  // namespace detail

// -- network checkpoints -----------------------------------------------------------

inline void store_network(std::ostream& os, const DenseNetwork& net) {
    validate_network(net);
    os << "mimovq-net 1\n";
    os << "layers " << net.layers.size() << '\n';
    for (const Layer& l : net.layers) {
        os << "layer " << l.in << ' ' << l.out << ' ' << to_string(l.activation.kind);
        if (l.activation.kind == Activation::ClusterSoftmax)
            os << ' ' << l.activation.clusters << ' ' << l.activation.cluster_size;
        os << '\n';
        detail::write_values(os, "w", l.w);
        detail::write_values(os, "b", l.b);
    }
}

inline DenseNetwork load_network(std::istream& is) {
    detail::expect_token(is, "mimovq-net", "load_network");
    int version = 0;
    if (!(is >> version) || version != 1) throw std::runtime_error("load_network: unsupported version");
    detail::expect_token(is, "layers", "load_network");
    std::size_t count = 0;
    if (!(is >> count) || count == 0) throw std::runtime_error("load_network: bad layer count");

    DenseNetwork net;
    for (std::size_t i = 0; i < count; ++i) {
        detail::expect_token(is, "layer", "load_network");
        Layer l;
        std::string act;
        if (!(is >> l.in >> l.out >> act)) throw std::runtime_error("load_network: bad layer header");
        if (act == "relu") {
            l.activation = relu_activation();
        } else if (act == "linear") {
            l.activation = linear_activation();
        } else if (act == "softmax") {
            l.activation = softmax_activation();
        } else if (act == "sigmoid") {
            l.activation = sigmoid_activation();
        } else if (act == "cluster_softmax") {
            int clusters = 0, size = 0;
            if (!(is >> clusters >> size)) throw std::runtime_error("load_network: bad cluster shape");
            l.activation = cluster_softmax_activation(clusters, size);
        } else {
            throw std::runtime_error("load_network: unknown activation '" + act + "'");
        }
        l.w.resize(static_cast<std::size_t>(l.in) * l.out);
        l.b.resize(l.out);
        detail::read_values(is, "w", l.w, "load_network");
        detail::read_values(is, "b", l.b, "load_network");
        net.layers.push_back(std::move(l));
    }
    validate_network(net);
    return net;
}

// -- detector bundles ---------------------------------------------------------------

inline void store_detector(std::ostream& os, const VqDetector& det) {
    os << "mimovq-detector 1\n";
    os << "scheme " << to_string(det.config.constellation.scheme) << '\n';
    os << "tx " << det.config.tx_antennas << '\n';
    os << "rx " << det.config.rx_antennas << '\n';
    os << "mapping " << to_string(det.mapping.kind) << '\n';
    os << "front_end " << to_string(det.front_end) << '\n';
    store_network(os, det.net);
}

inline VqDetector load_detector(std::istream& is) {
    detail::expect_token(is, "mimovq-detector", "load_detector");
    int version = 0;
    if (!(is >> version) || version != 1) throw std::runtime_error("load_detector: unsupported version");
    std::string scheme, mapping, front_end;
    int tx = 0, rx = 0;
    detail::expect_token(is, "scheme", "load_detector");
    is >> scheme;
    detail::expect_token(is, "tx", "load_detector");
    is >> tx;
    detail::expect_token(is, "rx", "load_detector");
    is >> rx;
    detail::expect_token(is, "mapping", "load_detector");
    is >> mapping;
    detail::expect_token(is, "front_end", "load_detector");
    is >> front_end;
    if (!is) throw std::runtime_error("load_detector: truncated header");

    VqDetector det;
    det.config = make_mimo_config(tx, rx, parse_scheme(scheme));
    det.mapping = make_mapping(parse_mapping(mapping), tx, det.config.constellation);
    det.front_end = parse_front_end(front_end);
    det.net = load_network(is);
    if (det.net.input_dim() != vq_input_dim(det.config, det.front_end) ||
        det.net.output_dim() != static_cast<int>(det.mapping.target_dim))
        throw std::runtime_error("load_detector: network shape does not match bundle header");
    return det;
}

// -- lattice bundles ----------------------------------------------------------------

inline void store_mnnet(std::ostream& os, const MnnetGraph& graph) {
    os << "mimovq-mnnet 1\n";
    os << "scheme " << to_string(graph.config.constellation.scheme) << '\n';
    os << "tx " << graph.config.tx_antennas << '\n';
    os << "rx " << graph.config.rx_antennas << '\n';
    os << "wiring " << kMnnetWiringVersion << '\n';
    for (const DenseNetwork& net : graph.layer_nets) store_network(os, net);
}

inline MnnetGraph load_mnnet(std::istream& is) {
    detail::expect_token(is, "mimovq-mnnet", "load_mnnet");
    int version = 0;
    if (!(is >> version) || version != 1) throw std::runtime_error("load_mnnet: unsupported version");
    std::string scheme;
    int tx = 0, rx = 0, wiring = 0;
    detail::expect_token(is, "scheme", "load_mnnet");
    is >> scheme;
    detail::expect_token(is, "tx", "load_mnnet");
    is >> tx;
    detail::expect_token(is, "rx", "load_mnnet");
    is >> rx;
    detail::expect_token(is, "wiring", "load_mnnet");
    is >> wiring;
    if (!is) throw std::runtime_error("load_mnnet: truncated header");
    if (wiring != kMnnetWiringVersion) throw std::runtime_error("load_mnnet: unsupported wiring version");

    MnnetGraph graph;
    graph.config = make_mimo_config(tx, rx, parse_scheme(scheme));
    for (int m = 1; m <= tx; ++m) {
        DenseNetwork net = load_network(is);
        if (net.input_dim() != mnnet_module_input_dim(graph.config, m) ||
            net.output_dim() != static_cast<int>(mnnet_module_output_dim(graph.config, m)))
            throw std::runtime_error("load_mnnet: layer network shape does not match header");
        graph.layer_nets.push_back(std::move(net));
    }
    return graph;
}

// -- file helpers --------------------------------------------------------------------

template <typename T, typename StoreFn>
inline void store_to_file(const std::string& path, const T& value, StoreFn&& fn) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    fn(os, value);
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline void save_detector_file(const std::string& path, const VqDetector& det) {
    store_to_file(path, det, [](std::ostream& os, const VqDetector& d) { store_detector(os, d); });
}

inline VqDetector load_detector_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open detector bundle: " + path);
    return load_detector(is);
}

inline void save_mnnet_file(const std::string& path, const MnnetGraph& graph) {
    store_to_file(path, graph, [](std::ostream& os, const MnnetGraph& g) { store_mnnet(os, g); });
}

inline MnnetGraph load_mnnet_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open lattice bundle: " + path);
    return load_mnnet(is);
}

inline void save_network_file(const std::string& path, const DenseNetwork& net) {
    store_to_file(path, net, [](std::ostream& os, const DenseNetwork& n) { store_network(os, n); });
}

inline DenseNetwork load_network_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open network checkpoint: " + path);
    return load_network(is);
}

}  // namespace mimovq
