#pragma once

namespace kerrdiv {

enum class Side { Minus = 0, Plus = 1 };

inline int side_index(Side s) { return s == Side::Minus ? 0 : 1; }
inline double side_sign(Side s) { return s == Side::Minus ? -1.0 : 1.0; }

} // namespace kerrdiv
