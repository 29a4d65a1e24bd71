#include "quadcert/instance.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace quadcert {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw InstanceError(field, msg);
}

int require_int(const json& j, const char* field) {
    if (!j.contains(field)) fail(field, "missing");
    const json& v = j.at(field);
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<int>();
}

}  // namespace

std::vector<SymMatrix> Instance::full_matrices() const {
    if (convention == "half") {
        std::vector<SymMatrix> out;
        out.reserve(matrices.size());
        for (const auto& q : matrices) out.push_back(q * 0.5);
        return out;
    }
    return matrices;
}

Vector Instance::system_alpha() const {
    if (homogeneous) return Vector::Zero(m);
    if (alpha) return *alpha;
    const auto full = full_matrices();
    Vector a(m);
    for (int i = 0; i < m; ++i) a[i] = full[static_cast<std::size_t>(i)].trace();
    return a;
}

Instance parse_instance_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail("file", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("file", "top level must be an object");

    Instance inst;
    inst.version = require_int(j, "version");
    if (inst.version != 1) fail("version", "unsupported version (expected 1)");

    const int n = require_int(j, "n");
    if (n < 1) fail("n", "must be >= 1");
    inst.n = n;
    inst.m = require_int(j, "m");
    if (inst.m < 1) fail("m", "must be >= 1");

    if (j.contains("convention")) {
        if (!j.at("convention").is_string()) fail("convention", "expected a string");
        inst.convention = j.at("convention").get<std::string>();
        if (inst.convention != "full" && inst.convention != "half") {
            fail("convention", "must be \"full\" or \"half\"");
        }
    }
    if (j.contains("homogeneous")) {
        if (!j.at("homogeneous").is_boolean()) fail("homogeneous", "expected a boolean");
        inst.homogeneous = j.at("homogeneous").get<bool>();
    }

    if (!j.contains("matrices")) fail("matrices", "missing");
    const json& mats = j.at("matrices");
    if (!mats.is_array() || static_cast<int>(mats.size()) != inst.m) {
        fail("matrices", "expected an array of m matrices");
    }
    inst.matrices.reserve(static_cast<std::size_t>(inst.m));
    for (int k = 0; k < inst.m; ++k) {
        std::ostringstream name;
        name << "matrices[" << k << "]";
        const json& entry = mats.at(static_cast<std::size_t>(k));
        if (!entry.is_array() || static_cast<Index>(entry.size()) != inst.n * inst.n) {
            fail(name.str(), "expected a flat row-major array of n*n reals");
        }
        Matrix mat(inst.n, inst.n);
        for (Index i = 0; i < inst.n; ++i) {
            for (Index c = 0; c < inst.n; ++c) {
                const json& cell = entry.at(static_cast<std::size_t>(i * inst.n + c));
                if (!cell.is_number()) fail(name.str(), "matrix entries must be numbers");
                mat(i, c) = cell.get<double>();
            }
        }
        const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
        const double asym = (mat - mat.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-6 * scale) {
            fail(name.str(), "asymmetric beyond tolerance (1e-6 relative)");
        }
        inst.matrices.emplace_back(std::move(mat));
    }

    if (j.contains("alpha") && !j.at("alpha").is_null()) {
        const json& a = j.at("alpha");
        if (!a.is_array() || static_cast<int>(a.size()) != inst.m) {
            fail("alpha", "expected an array of m reals");
        }
        Vector alpha(inst.m);
        for (int i = 0; i < inst.m; ++i) {
            const json& cell = a.at(static_cast<std::size_t>(i));
            if (!cell.is_number()) fail("alpha", "entries must be numbers");
            alpha[i] = cell.get<double>();
        }
        if (inst.homogeneous && alpha.cwiseAbs().maxCoeff() > 0.0) {
            fail("alpha", "homogeneous instance requires alpha absent or all zeros");
        }
        inst.alpha = std::move(alpha);
    }
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("file", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance_text(buf.str());
}

std::string write_instance(const Instance& inst) {
    std::ostringstream os;
    os << "{\n";
    if (inst.alpha) {
        os << "  \"alpha\": [";
        for (Index i = 0; i < inst.alpha->size(); ++i) {
            if (i) os << ", ";
            os << fmt_double((*inst.alpha)[i]);
        }
        os << "],\n";
    }
    os << "  \"convention\": \"" << inst.convention << "\",\n";
    os << "  \"homogeneous\": " << (inst.homogeneous ? "true" : "false") << ",\n";
    os << "  \"m\": " << inst.m << ",\n";
    os << "  \"matrices\": [\n";
    for (std::size_t k = 0; k < inst.matrices.size(); ++k) {
        const Matrix& mat = inst.matrices[k].mat();
        os << "    [";
        for (Index i = 0; i < inst.n; ++i) {
            for (Index c = 0; c < inst.n; ++c) {
                if (i || c) os << ", ";
                os << fmt_double(mat(i, c));
            }
        }
        os << "]" << (k + 1 < inst.matrices.size() ? "," : "") << "\n";
    }
    os << "  ],\n";
    os << "  \"n\": " << inst.n << ",\n";
    os << "  \"version\": " << inst.version << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace quadcert
