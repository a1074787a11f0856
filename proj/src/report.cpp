#include "gfold/report.hpp"

#include <cstdio>
#include <sstream>

namespace gfold {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void Report::set(const std::string& key, const std::string& value) { kv_[key] = value; }
void Report::set(const std::string& key, long long value) { kv_[key] = std::to_string(value); }
void Report::set(const std::string& key, double value) { kv_[key] = format_double(value); }
void Report::set(const std::string& key, const Frac& value) { kv_[key] = value.str(); }
void Report::set(const std::string& key, bool value) { kv_[key] = value ? "true" : "false"; }

std::string Report::str() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << "=" << v << "\n";
    return out.str();
}

std::string Report::indexed(const std::string& stem, int i, int width) {
    std::string digits = std::to_string(i);
    if (static_cast<int>(digits.size()) < width)
        digits.insert(0, width - digits.size(), '0');
    return stem + digits;
}

} // namespace gfold
