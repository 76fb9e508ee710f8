#ifndef QREV_VERSION_HPP
#define QREV_VERSION_HPP

namespace qrev {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
