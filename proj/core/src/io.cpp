#include "pluripot/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>

namespace pluripot {
namespace {

// Payloads are written as raw host doubles; little-endian hosts only
// (asserted at compile time where the ABI exposes it).
static_assert(sizeof(double) == 8);

void put_u32(std::ofstream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("hmaf: truncated header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}

void put_doubles(std::ofstream& os, const double* p, std::size_t count) {
    os.write(reinterpret_cast<const char*>(p), std::streamsize(count * 8));
}

void get_doubles(std::ifstream& is, double* p, std::size_t count) {
    is.read(reinterpret_cast<char*>(p), std::streamsize(count * 8));
    if (!is) throw IoError("hmaf: truncated payload");
}

struct HmafHeader {
    HmafKind kind;
    GridSpec grid;
    int p = 0, q = 0;
    std::uint32_t ncomp = 0;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    return os;
}

void write_header(std::ofstream& os, HmafKind kind, const GridSpec& g, int p, int q,
                  std::uint32_t ncomp) {
    os.write("HMAF", 4);
    put_u32(os, kHmafVersion);
    put_u32(os, std::uint32_t(kind));
    put_u32(os, std::uint32_t(g.n));
    put_u32(os, std::uint32_t(g.res));
    put_u32(os, std::uint32_t(p));
    put_u32(os, std::uint32_t(q));
    put_u32(os, ncomp);
}

HmafHeader read_header(std::ifstream& is, const std::string& path) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "HMAF", 4) != 0)
        throw IoError("not an HMAF file: " + path);
    std::uint32_t version = get_u32(is);
    if (version != kHmafVersion) throw IoError("hmaf: unsupported version");
    HmafHeader h;
    std::uint32_t kind = get_u32(is);
    if (kind > 2) throw IoError("hmaf: unknown kind tag");
    h.kind = HmafKind(kind);
    int n = int(get_u32(is));
    int res = int(get_u32(is));
    h.grid = GridSpec(n, res);  // validates n/res
    h.p = int(get_u32(is));
    h.q = int(get_u32(is));
    h.ncomp = get_u32(is);
    return h;
}

}  // namespace

void write_hmaf(const std::string& path, const ScalarField& f) {
    std::ofstream os = open_out(path);
    write_header(os, HmafKind::scalar, f.grid, 0, 0, 1);
    put_doubles(os, f.v.data(), f.v.size());
    if (!os) throw IoError("write failed: " + path);
}

void write_hmaf(const std::string& path, const HermitianForm11Field& f) {
    const GridSpec& g = f.grid();
    const int nc = HermitianForm11Field::num_components(g.n);
    const std::size_t np = std::size_t(g.num_points());
    std::ofstream os = open_out(path);
    write_header(os, HmafKind::herm11, g, 1, 1, std::uint32_t(nc));
    if (f.is_uniform()) {
        // stream the constant without densifying in memory
        std::vector<double> row(np);
        const HermitianMatrix& m = f.uniform_value();
        for (int c = 0; c < nc; ++c) {
            double v = 0.0;
            bool found = false;
            for (int j = 0; j < g.n && !found; ++j)
                if (HermitianForm11Field::diag_component(g.n, j) == c) {
                    v = m(j, j).real();
                    found = true;
                }
            for (int j = 0; j < g.n && !found; ++j)
                for (int k = j + 1; k < g.n && !found; ++k)
                    for (int im = 0; im < 2 && !found; ++im)
                        if (HermitianForm11Field::offdiag_component(g.n, j, k, im) == c) {
                            v = im ? m(j, k).imag() : m(j, k).real();
                            found = true;
                        }
            if (!found) throw IoError("hmaf: component map inconsistency");
            std::fill(row.begin(), row.end(), v);
            put_doubles(os, row.data(), np);
        }
    } else {
        for (int c = 0; c < nc; ++c) {
            auto sp = f.component(c);
            put_doubles(os, sp.data(), sp.size());
        }
    }
    if (!os) throw IoError("write failed: " + path);
}

void write_hmaf(const std::string& path, const FormField& f) {
    const std::size_t np = std::size_t(f.grid.num_points());
    std::ofstream os = open_out(path);
    write_header(os, HmafKind::form, f.grid, f.p, f.q, std::uint32_t(f.comp.size()));
    std::vector<double> row(np);
    for (const auto& c : f.comp) {
        for (std::size_t i = 0; i < np; ++i) row[i] = c[i].real();
        put_doubles(os, row.data(), np);
        for (std::size_t i = 0; i < np; ++i) row[i] = c[i].imag();
        put_doubles(os, row.data(), np);
    }
    if (!os) throw IoError("write failed: " + path);
}

HmafKind peek_hmaf(const std::string& path, GridSpec* grid, int* p, int* q) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    HmafHeader h = read_header(is, path);
    if (grid) *grid = h.grid;
    if (p) *p = h.p;
    if (q) *q = h.q;
    return h.kind;
}

ScalarField read_hmaf_scalar(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    HmafHeader h = read_header(is, path);
    if (h.kind != HmafKind::scalar) throw IoError("hmaf: expected a scalar field: " + path);
    ScalarField f(h.grid);
    get_doubles(is, f.v.data(), f.v.size());
    return f;
}

HermitianForm11Field read_hmaf_herm11(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    HmafHeader h = read_header(is, path);
    if (h.kind != HmafKind::herm11) throw IoError("hmaf: expected a herm11 field: " + path);
    const int nc = HermitianForm11Field::num_components(h.grid.n);
    if (int(h.ncomp) != nc) throw IoError("hmaf: component count mismatch: " + path);
    HermitianForm11Field f(h.grid, true);
    for (int c = 0; c < nc; ++c) {
        auto sp = f.component(c);
        get_doubles(is, sp.data(), sp.size());
    }
    return f;
}

FormField read_hmaf_form(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    HmafHeader h = read_header(is, path);
    if (h.kind != HmafKind::form) throw IoError("hmaf: expected a form field: " + path);
    FormField f(h.grid, h.p, h.q);
    if (int(h.ncomp) != f.num_comps()) throw IoError("hmaf: component count mismatch: " + path);
    const std::size_t np = std::size_t(h.grid.num_points());
    std::vector<double> re(np), im(np);
    for (auto& c : f.comp) {
        get_doubles(is, re.data(), np);
        get_doubles(is, im.data(), np);
        for (std::size_t i = 0; i < np; ++i) c[i] = cplx{re[i], im[i]};
    }
    return f;
}

json make_report(const std::string& scenario, const std::string& op, json inputs, json metrics,
                 json tolerances, std::uint64_t seed) {
    json j;
    j["scenario"] = scenario;
    j["op"] = op;
    j["inputs"] = std::move(inputs);
    j["metrics"] = std::move(metrics);
    j["tolerances"] = std::move(tolerances);
    j["seed"] = seed;
#ifdef PLURIPOT_COMMIT
    j["commit"] = PLURIPOT_COMMIT;
#else
    j["commit"] = "unknown";
#endif
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = std::string(kToolName) + " " + kToolVersion;
    return j;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << dump_report(j);
    if (!os) throw IoError("write failed: " + path);
}

std::string format_double(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace pluripot
