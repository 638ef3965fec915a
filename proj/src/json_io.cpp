#include "onticlab/json_io.hpp"

#include <fstream>

namespace onticlab {

nlohmann::json to_json(const Complex& z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json to_json(const CVector& v) {
    auto j = nlohmann::json::array();
    for (int i = 0; i < v.dim(); ++i) j.push_back(to_json(v[i]));
    return j;
}

nlohmann::json to_json(const CMatrix& m) {
    auto j = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        j.push_back(row);
    }
    return j;
}

Complex complex_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(path + ": expected complex number as [re, im]");
    return Complex{j[0].get<double>(), j[1].get<double>()};
}

CVector cvector_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw ParseError(path + ": expected non-empty array of [re, im] entries");
    CVector v(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
        v[static_cast<int>(i)] = complex_from_json(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

CMatrix cmatrix_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw ParseError(path + ": expected non-empty array of rows");
    int rows = static_cast<int>(j.size());
    if (!j[0].is_array() || j[0].empty())
        throw ParseError(path + "[0]: expected non-empty row");
    int cols = static_cast<int>(j[0].size());
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(path + "[" + std::to_string(r) + "]: ragged row");
        for (int c = 0; c < cols; ++c)
            m(r, c) = complex_from_json(row[static_cast<size_t>(c)],
                                        path + "[" + std::to_string(r) + "][" +
                                            std::to_string(c) + "]");
    }
    return m;
}

nlohmann::json load_json_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw Error("cannot open file: " + filename);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(filename + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& filename, const nlohmann::json& j) {
    std::ofstream out(filename);
    if (!out) throw Error("cannot open file for writing: " + filename);
    out << j.dump(2) << "\n";
}

} // namespace onticlab
