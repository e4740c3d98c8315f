#pragma once

#include <chrono>
#include <string>

#include "hdbench/error.hpp"
#include "hdbench/prep/augment.hpp"
#include "httplib.h"
#include "json.hpp"

namespace hdbench::prep {

/// Translation transport that POSTs the request JSON to an HTTP endpoint.
/// Connection failures, timeouts, non-200 statuses and unparsable bodies all
/// surface as exceptions, which `augment` counts as per-item failures.
inline TranslationTransport http_translation_transport(std::string host, int port, std::string path,
                                                       std::chrono::milliseconds timeout) {
  return [host = std::move(host), port, path = std::move(path), timeout](const nlohmann::json& request) {
    httplib::Client client(host, port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, request.dump(), "application/json");
    if (!res) throw ProtocolError("translation request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ProtocolError("translation service returned HTTP " + std::to_string(res->status));
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("translation response is not JSON: ") + e.what());
    }
  };
}

}  // namespace hdbench::prep
