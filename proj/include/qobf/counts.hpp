#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qobf {

// Measurement histogram keyed by bitstring (bit 0 printed rightmost).
struct CountsDistribution {
    std::uint64_t shots = 0;
    int bit_width = 0;
    std::map<std::string, std::uint64_t> counts;

    void validate() const {
        std::uint64_t total = 0;
        for (const auto& [key, n] : counts) {
            if (static_cast<int>(key.size()) != bit_width)
                throw std::invalid_argument("outcome key width mismatch");
            for (char ch : key)
                if (ch != '0' && ch != '1')
                    throw std::invalid_argument("outcome key not binary");
            total += n;
        }
        if (total != shots)
            throw std::invalid_argument("counts do not sum to shots");
    }
};

inline std::string outcome_string(std::size_t index, int bit_width) {
    std::string s(bit_width, '0');
    for (int b = 0; b < bit_width; ++b)
        if ((index >> b) & 1) s[bit_width - 1 - b] = '1';
    return s;
}

inline std::size_t outcome_index(const std::string& s) {
    std::size_t v = 0;
    for (char c : s) v = (v << 1) | static_cast<std::size_t>(c == '1');
    return v;
}

inline CountsDistribution counts_from_hist(
    const std::vector<std::uint64_t>& hist, int bit_width) {
    CountsDistribution d;
    d.bit_width = bit_width;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        d.shots += hist[i];
        if (hist[i] > 0) d.counts[outcome_string(i, bit_width)] = hist[i];
    }
    return d;
}

inline std::string counts_to_json(const CountsDistribution& d) {
    d.validate();
    nlohmann::ordered_json j;
    j["format"] = "qobf-counts";
    j["version"] = 1;
    j["shots"] = d.shots;
    j["bit_width"] = d.bit_width;
    j["counts"] = nlohmann::ordered_json::object();
    for (const auto& [key, n] : d.counts) j["counts"][key] = n;
    return j.dump(2) + "\n";
}

inline CountsDistribution counts_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != "qobf-counts")
        throw std::invalid_argument("not a counts file");
    if (j.value("version", 0) != 1)
        throw std::invalid_argument("unsupported counts version");
    CountsDistribution d;
    d.shots = j.at("shots").get<std::uint64_t>();
    d.bit_width = j.at("bit_width").get<int>();
    for (const auto& [key, val] : j.at("counts").items())
        d.counts[key] = val.get<std::uint64_t>();
    d.validate();
    return d;
}

}  // namespace qobf
