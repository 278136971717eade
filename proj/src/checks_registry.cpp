#include "check_impl.hpp"

namespace psv::checks {

void register_pf(std::vector<Entry>& out);
void register_s(std::vector<Entry>& out);
void register_b(std::vector<Entry>& out);

const std::vector<Entry>& registry() {
    static std::vector<Entry> entries = [] {
        std::vector<Entry> out;
        register_pf(out);
        register_s(out);
        register_b(out);
        return out;
    }();
    return entries;
}

}  // namespace psv::checks
