#include "optoforce/errors.hpp"

#include <iostream>
#include <utility>

namespace optoforce {

namespace {
WarningHandler& handler_slot() {
    static WarningHandler handler = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return handler;
}
}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    if (!handler) {
        handler = [](std::string_view) {};
    }
    return std::exchange(handler_slot(), std::move(handler));
}

void warn(std::string_view message) { handler_slot()(message); }

}  // namespace optoforce
