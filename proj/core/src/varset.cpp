#include "qprime/varset.hpp"

#include "qprime/errors.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace qprime {

int VarSet::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw parse_error("unknown variable '" + name + "'");
    return static_cast<int>(it - names.begin());
}

VarSetPtr make_varset(std::vector<std::string> names) {
    auto vs = std::make_shared<VarSet>();
    vs->names = std::move(names);
    int m = vs->arity();
    vs->conj.assign(m, 0);
    for (int i = 0; i < m; ++i) {
        const std::string& nm = vs->names[i];
        std::string partner = (nm.size() > 1 && nm.back() == 'b')
                                  ? nm.substr(0, nm.size() - 1)
                                  : nm + "b";
        auto it = std::find(vs->names.begin(), vs->names.end(), partner);
        vs->conj[i] = (it == vs->names.end()) ? i : static_cast<int>(it - vs->names.begin());
    }
    return vs;
}

namespace {

std::vector<std::string> z_names(int n) {
    std::vector<std::string> v;
    if (n == 1) {
        v = {"z", "zb"};
    } else {
        for (int j = 1; j <= n; ++j) {
            v.push_back("z" + std::to_string(j));
            v.push_back("z" + std::to_string(j) + "b");
        }
    }
    return v;
}

VarSetPtr cached(std::map<std::pair<int, int>, VarSetPtr>& cache, int n, int kind,
                 std::vector<std::string> names) {
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(n, kind);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto vs = make_varset(std::move(names));
    cache[key] = vs;
    return vs;
}

std::map<std::pair<int, int>, VarSetPtr>& cache_map() {
    static std::map<std::pair<int, int>, VarSetPtr> m;
    return m;
}

} // namespace

VarSetPtr ambient_vars(int n) {
    auto v = z_names(n);
    v.push_back("w");
    v.push_back("wb");
    return cached(cache_map(), n, 0, std::move(v));
}

VarSetPtr boundary_vars(int n) {
    auto v = z_names(n);
    v.push_back("t");
    return cached(cache_map(), n, 1, std::move(v));
}

VarSetPtr shell_vars(int n) {
    auto v = z_names(n);
    v.push_back("u");
    v.push_back("wb");
    return cached(cache_map(), n, 2, std::move(v));
}

int ambient_w_index(int n) { return 2 * n; }

} // namespace qprime
