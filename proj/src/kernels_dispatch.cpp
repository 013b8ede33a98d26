#include "absde/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace absde::kernels {
namespace {

const KernelTable* detect() {
    if (const char* forced = std::getenv("ABSDE_KERNELS")) {
        const std::string_view want(forced);
        for (const KernelTable* t : available())
            if (t->name == want) return t;
    }
    if (const KernelTable* t = avx2_table()) return t;
    if (const KernelTable* t = neon_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{detect()};
    return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool select(std::string_view name) {
    for (const KernelTable* t : available()) {
        if (t->name == name) {
            slot().store(t, std::memory_order_release);
            return true;
        }
    }
    return false;
}

std::vector<const KernelTable*> available() {
    std::vector<const KernelTable*> out{&scalar_table()};
    if (const KernelTable* t = avx2_table()) out.push_back(t);
    if (const KernelTable* t = neon_table()) out.push_back(t);
    return out;
}

}  // namespace absde::kernels
