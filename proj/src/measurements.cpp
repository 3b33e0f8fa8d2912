#include "srmusic/measurements.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "srmusic/errors.hpp"
#include "srmusic/json_io.hpp"

namespace srmusic
{

namespace
{

CVectorXd assemble(const std::map<long, std::complex<double>>& entries)
{
    if (entries.empty()) {
        throw InvalidInput("measurements: no entries");
    }
    const long n = static_cast<long>(entries.size());
    if (entries.begin()->first != 0 || entries.rbegin()->first != n - 1) {
        throw InvalidInput("measurements: indices must cover 0..M exactly once");
    }
    CVectorXd y(n);
    for (const auto& [k, v] : entries) y(k) = v;
    return y;
}

} // namespace

CVectorXd read_measurements_csv(std::istream& is)
{
    std::map<long, std::complex<double>> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
            throw InvalidInput("measurements: line " + std::to_string(lineno) + " is not 'index,re,im'");
        }
        long idx;
        double re, im;
        try {
            std::size_t used = 0;
            idx = std::stol(a, &used);
            re = std::stod(b);
            im = std::stod(c);
        } catch (const std::logic_error&) {
            if (lineno == 1) continue; // header
            throw InvalidInput("measurements: unparsable line " + std::to_string(lineno));
        }
        if (!entries.emplace(idx, std::complex<double>(re, im)).second) {
            throw InvalidInput("measurements: duplicate index " + std::to_string(idx));
        }
    }
    return assemble(entries);
}

CVectorXd read_measurements(const std::filesystem::path& path)
{
    if (path.extension() == ".json") {
        auto doc = read_json_file(path);
        if (doc.is_object() && doc.contains("measurements")) doc = doc.at("measurements");
        if (!doc.is_array()) throw InvalidInput("measurements: expected a JSON array");
        std::map<long, std::complex<double>> entries;
        long k = 0;
        try {
            for (const auto& e : doc) {
                if (e.is_array()) {
                    entries[k] = {e.at(0).get<double>(), e.at(1).get<double>()};
                } else {
                    entries[e.at("index").get<long>()] = {e.at("re").get<double>(), e.at("im").get<double>()};
                }
                ++k;
            }
        } catch (const json::exception& e) {
            throw InvalidInput(std::string("measurements: ") + e.what());
        }
        if (static_cast<long>(entries.size()) != k) throw InvalidInput("measurements: duplicate index");
        return assemble(entries);
    }
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    return read_measurements_csv(in);
}

void write_measurements_csv(std::ostream& os, const CVectorXd& y)
{
    os << "index,re,im\n";
    char buf[96];
    for (Index k = 0; k < y.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", static_cast<long>(k), y(k).real(), y(k).imag());
        os << buf;
    }
}

void write_imaging_grid_csv(std::ostream& os, const ImagingGrid& grid)
{
    os << "omega,R,J\n";
    char buf[96];
    for (Index k = 0; k < grid.resolution; ++k) {
        const auto i = static_cast<std::size_t>(k);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.node(k), grid.R[i], grid.J[i]);
        os << buf;
    }
}

} // namespace srmusic
