#include "bandchol/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bandchol {

unsigned resolve_threads(std::optional<unsigned> requested) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("BANDCHOL_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace bandchol
