#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "offline_guard.hpp"

#include <iostream>

int main(int argc, char** argv) {
    doctest::Context context(argc, argv);
    const int rc = context.run();
    if (context.shouldExit()) return rc;
    if (offline_guard::blocked_calls() != 0) {
        std::cerr << "offline guard: " << offline_guard::blocked_calls()
                  << " network call(s) refused; last: " << offline_guard::last_blocked() << '\n';
        return rc == 0 ? 3 : rc;
    }
    return rc;
}
