#include "quadcert/parallel.hpp"

#include <cstdlib>
#include <string>

namespace quadcert {

int resolve_threads(int requested) {
    if (const char* env = std::getenv("QUADCERT_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (...) {
            // ignore malformed values and fall through to the request
        }
    }
    return requested >= 1 ? requested : 1;
}

}  // namespace quadcert
