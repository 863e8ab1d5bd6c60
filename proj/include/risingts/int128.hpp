#pragma once

namespace risingts {

__extension__ typedef __int128 Int128;

}  // namespace risingts
