#include "drcycle/parallel.hpp"

#include <cstdlib>
#include <string>

namespace drc {

namespace {

int from_env() {
    const char* s = std::getenv("DRCYCLE_THREADS");
    if (!s) return 1;
    try {
        int n = std::stoi(s);
        return n > 0 ? n : 1;
    } catch (...) {
        return 1;
    }
}

std::atomic<int>& slot() {
    static std::atomic<int> n{from_env()};
    return n;
}

}  // namespace

int thread_count() { return slot().load(); }

void set_thread_count(int n) { slot().store(n > 0 ? n : 1); }

bool& in_worker() {
    thread_local bool flag = false;
    return flag;
}

}  // namespace drc
