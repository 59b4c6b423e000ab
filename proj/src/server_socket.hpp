#pragma once

#include <sys/socket.h>

#include <httplib.h>

namespace drugbus::detail {

// httplib's default enables SO_REUSEPORT, which lets a second server bind a
// port that is already serving. Keep SO_REUSEADDR only, so that restarts
// still work while a live port is reported as taken.
inline void use_exclusive_port(httplib::Server& server) {
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
}

}  // namespace drugbus::detail
