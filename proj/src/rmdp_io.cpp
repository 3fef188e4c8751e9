#include "drrl/rmdp_io.hpp"

#include "drrl/errors.hpp"

#include <fstream>
#include <set>

namespace drrl {

using nlohmann::json;

json rmdp_to_json(const TabularRMDP& m) {
    const int S = m.num_states(), A = m.num_actions(), H = m.horizon();
    json rewards = json::array(), kernel = json::array();
    for (int h = 0; h < H; ++h) {
        json rh = json::array(), kh = json::array();
        for (int s = 0; s < S; ++s) {
            json rs = json::array(), ks = json::array();
            for (int a = 0; a < A; ++a) {
                rs.push_back(m.reward(h, s, a));
                auto row = m.kernel_row(h, s, a);
                ks.push_back(std::vector<double>(row.begin(), row.end()));
            }
            rh.push_back(std::move(rs));
            kh.push_back(std::move(ks));
        }
        rewards.push_back(std::move(rh));
        kernel.push_back(std::move(kh));
    }
    return json{{"S", S},
                {"A", A},
                {"H", H},
                {"rewards", std::move(rewards)},
                {"kernel", std::move(kernel)},
                {"fail_states", m.fail_states()},
                {"initial_state", m.initial_state()}};
}

TabularRMDP rmdp_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("model document must be an object");
    static const std::set<std::string> known{"S", "A", "H", "rewards", "kernel", "fail_states",
                                             "initial_state"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) throw ValidationError("unknown model key '" + key + "'");
    for (const auto& key : known)
        if (!doc.contains(key)) throw ValidationError("missing model key '" + key + "'");
    try {
        const int S = doc.at("S").get<int>(), A = doc.at("A").get<int>(), H = doc.at("H").get<int>();
        if (S <= 0 || A <= 0 || H <= 0) throw ValidationError("S, A, H must be positive");
        const auto& rj = doc.at("rewards");
        const auto& kj = doc.at("kernel");
        if (rj.size() != static_cast<std::size_t>(H) || kj.size() != static_cast<std::size_t>(H))
            throw ValidationError("rewards/kernel must have H entries");
        std::vector<double> rewards;
        TransitionKernel kernel(S, A, H);
        for (int h = 0; h < H; ++h) {
            if (rj[h].size() != static_cast<std::size_t>(S) || kj[h].size() != static_cast<std::size_t>(S))
                throw ValidationError("rewards[h]/kernel[h] must have S entries");
            for (int s = 0; s < S; ++s) {
                if (rj[h][s].size() != static_cast<std::size_t>(A) ||
                    kj[h][s].size() != static_cast<std::size_t>(A))
                    throw ValidationError("rewards[h][s]/kernel[h][s] must have A entries");
                for (int a = 0; a < A; ++a) {
                    rewards.push_back(rj[h][s][a].get<double>());
                    const auto row = kj[h][s][a].get<std::vector<double>>();
                    if (row.size() != static_cast<std::size_t>(S))
                        throw ValidationError("kernel rows must have S entries");
                    std::copy(row.begin(), row.end(), kernel.row(h, s, a).begin());
                }
            }
        }
        return TabularRMDP(S, A, H, std::move(rewards), std::move(kernel),
                           doc.at("fail_states").get<std::vector<int>>(),
                           doc.at("initial_state").get<int>());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model document: ") + e.what());
    }
}

TabularRMDP load_rmdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("cannot parse " + path + ": " + e.what());
    }
    return rmdp_from_json(doc);
}

void save_rmdp(const TabularRMDP& rmdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << rmdp_to_json(rmdp).dump(2) << '\n';
}

} // namespace drrl
