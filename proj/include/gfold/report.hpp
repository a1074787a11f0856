#pragma once

#include <map>
#include <string>

#include "gfold/exact.hpp"

namespace gfold {

// Structured key=value report with stable (sorted) key order, so runs
// diff cleanly.  Indexed keys are zero-padded to keep lexicographic and
// numeric order aligned.
class Report {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }
    void set(const std::string& key, long long value);
    void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
    void set(const std::string& key, double value);
    void set(const std::string& key, const Frac& value);
    void set(const std::string& key, bool value);

    std::string str() const;

    static std::string indexed(const std::string& stem, int i, int width = 3);

private:
    std::map<std::string, std::string> kv_;
};

std::string format_double(double v);

} // namespace gfold
