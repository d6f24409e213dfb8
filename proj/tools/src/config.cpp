#include "khintype/cli/config.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "khintype/counting.hpp"

namespace khintype::cli {

namespace {

std::vector<std::string> split_trim(const std::string& text, const char* sep) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(sep));
    std::vector<std::string> out;
    for (auto& p : parts) {
        boost::trim(p);
        if (!p.empty()) out.push_back(p);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split_trim(text, ",")) {
        size_t used = 0;
        const double v = std::stod(p, &used);
        if (used != p.size()) throw std::invalid_argument("not a number: " + p);
        out.push_back(v);
    }
    return out;
}

bool parse_bool(const std::string& v) {
    const auto s = boost::to_lower_copy(v);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw std::invalid_argument("not a boolean: " + v);
}

template <class T>
T parse_integral(const std::string& key, const std::string& v) {
    size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " must be an integer, got '" + v + "'");
    }
    if (used != v.size()) throw std::invalid_argument("config: " + key + " must be an integer, got '" + v + "'");
    return static_cast<T>(x);
}

}  // namespace

void load_ini(const std::string& path, RunConfig& cfg) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    static const std::set<std::string> sections{"run", "manifold", "sweep", "params", "output"};
    for (const auto& [section, body] : tree) {
        if (!sections.contains(section))
            throw std::invalid_argument("config: unknown section [" + section + "]");
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            std::string v = node.get_value<std::string>();
            boost::trim(v);
            if (full == "run.command") cfg.command = v;
            else if (full == "run.seed") cfg.seed = std::stoull(v);
            else if (full == "run.threads") cfg.threads = parse_integral<int>(full, v);
            else if (full == "manifold.name") cfg.manifold = v;
            else if (full == "manifold.source") cfg.source = v;
            else if (full == "manifold.lo") cfg.lo = v;
            else if (full == "manifold.hi") cfg.hi = v;
            else if (full == "sweep.q") cfg.q = v;
            else if (full == "sweep.kappa") cfg.kappa = v;
            else if (full == "sweep.theta") cfg.theta = split_trim(v, ";");
            else if (full == "sweep.k") cfg.k = parse_integral<int>(full, v);
            else if (full == "params.delta") cfg.delta = parse_doubles(v);
            else if (full == "params.grid") cfg.grid = parse_integral<int>(full, v);
            else if (full == "params.budget") cfg.budget = parse_integral<long>(full, v);
            else if (full == "params.eps") cfg.eps = std::stod(v);
            else if (full == "params.dmax") cfg.dmax = parse_integral<int>(full, v);
            else if (full == "params.n") cfg.n = parse_integral<long>(full, v);
            else if (full == "params.d") cfg.d = parse_integral<int>(full, v);
            else if (full == "params.m") cfg.m = parse_integral<int>(full, v);
            else if (full == "params.s") cfg.s = v;
            else if (full == "params.probe") cfg.probe = parse_integral<long>(full, v);
            else if (full == "params.points") cfg.points = parse_integral<long>(full, v);
            else if (full == "params.alpha") cfg.alpha = v;
            else if (full == "params.verify") cfg.verify = parse_bool(v);
            else if (full == "output.path") cfg.output = v;
            else throw std::invalid_argument("config: unknown key " + full);
        }
    }
}

std::string canonical_text(const RunConfig& cfg) {
    std::ostringstream os;
    auto line = [&os](const char* key, const auto& value) { os << key << '=' << value << '\n'; };
    std::string deltas;
    for (size_t i = 0; i < cfg.delta.size(); ++i) deltas += (i ? "," : "") + format_double(cfg.delta[i]);
    line("command", cfg.command);
    line("manifold", cfg.manifold);
    line("source", cfg.source);
    line("lo", cfg.lo);
    line("hi", cfg.hi);
    line("q", cfg.q);
    line("kappa", cfg.kappa);
    line("theta", boost::join(cfg.theta, ";"));
    line("k", cfg.k);
    line("delta", deltas);
    line("grid", cfg.grid);
    line("budget", cfg.budget);
    line("eps", format_double(cfg.eps));
    line("dmax", cfg.dmax);
    line("n", cfg.n);
    line("d", cfg.d);
    line("m", cfg.m);
    line("s", cfg.s);
    line("probe", cfg.probe);
    line("points", cfg.points);
    line("alpha", cfg.alpha);
    line("verify", cfg.verify ? 1 : 0);
    line("seed", cfg.seed);
    return os.str();
}

std::string config_hash(const RunConfig& cfg) {
    const std::string text = canonical_text(cfg);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("config_hash: SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace khintype::cli
