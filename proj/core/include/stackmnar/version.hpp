#ifndef STACKMNAR_VERSION_HPP
#define STACKMNAR_VERSION_HPP

namespace stackmnar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stackmnar

#endif
