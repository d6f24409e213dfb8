#include "khintype/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace khintype {

int default_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("KHINTYPE_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) return cap;
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return hw;
}

int resolve_threads(int requested) { return requested >= 1 ? requested : default_threads(); }

}  // namespace khintype
