#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "qals/core.hpp"
#include "qals/errors.hpp"
#include "qals/samplers.hpp"

namespace qals {

// Capabilities advertised by GET {endpoint}/info.
struct RemoteInfo {
  double delta = 2.0;
  double gamma = 1.0;
  std::string topology = "custom";
  std::size_t max_nodes = 0;
};

// {"n", "biases", "couplings": [[i, j, v], ...], "num_reads"}; couplings
// list each edge once with i < j, in the graph's edge order.
inline nlohmann::json remote_request(const WeightMatrix& theta, std::size_t k) {
  nlohmann::json biases = nlohmann::json::array();
  for (std::size_t i = 0; i < theta.size(); ++i) biases.push_back(theta.bias(i));
  nlohmann::json couplings = nlohmann::json::array();
  for (const auto& [i, j] : theta.graph().edges())
    couplings.push_back(nlohmann::json::array({i, j, theta.coupling(i, j)}));
  return {{"n", theta.size()}, {"biases", std::move(biases)},
          {"couplings", std::move(couplings)}, {"num_reads", k}};
}

inline RemoteInfo parse_remote_info(const std::string& body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw malformed_response_error("info: not a JSON object");
  const auto number = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_number()) {
      throw malformed_response_error(std::string("info: missing numeric '") + key + "'");
    }
    return doc[key].get<double>();
  };
  RemoteInfo info;
  info.delta = number("delta");
  info.gamma = number("gamma");
  if (!(info.delta > 0.0) || !(info.gamma > 0.0)) {
    throw malformed_response_error("info: delta and gamma must be positive");
  }
  if (!doc.contains("topology") || !doc["topology"].is_string()) {
    throw malformed_response_error("info: missing 'topology'");
  }
  info.topology = doc["topology"].get<std::string>();
  if (info.topology != "chimera" && info.topology != "complete" && info.topology != "custom") {
    throw malformed_response_error("info: unknown topology '" + info.topology + "'");
  }
  if (!doc.contains("max_nodes") || !doc["max_nodes"].is_number_unsigned()) {
    throw malformed_response_error("info: missing 'max_nodes'");
  }
  info.max_nodes = doc["max_nodes"].get<std::size_t>();
  return info;
}

// Parses {"samples": [[+-1 ...] ...], "energies": [...]}. Vectors of the
// wrong length raise dimension_mismatch_error; anything else that breaks
// the schema raises malformed_response_error.
inline std::vector<SpinVector> parse_remote_samples(const std::string& body, std::size_t n) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw malformed_response_error("sample: not a JSON object");
  if (!doc.contains("samples") || !doc["samples"].is_array()) {
    throw malformed_response_error("sample: missing 'samples' array");
  }
  if (!doc.contains("energies") || !doc["energies"].is_array()) {
    throw malformed_response_error("sample: missing 'energies' array");
  }
  const auto& samples = doc["samples"];
  const auto& energies = doc["energies"];
  if (energies.size() != samples.size()) {
    throw malformed_response_error("sample: 'energies' and 'samples' differ in length");
  }
  for (const auto& e : energies)
    if (!e.is_number()) throw malformed_response_error("sample: non-numeric energy");

  std::vector<SpinVector> out;
  out.reserve(samples.size());
  for (const auto& row : samples) {
    if (!row.is_array()) throw malformed_response_error("sample: sample is not an array");
    if (row.size() != n) {
      throw dimension_mismatch_error("sample: vector of length " + std::to_string(row.size()) +
                                     ", expected " + std::to_string(n));
    }
    SpinVector z(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!row[i].is_number_integer() || (row[i].get<int>() != 1 && row[i].get<int>() != -1)) {
        throw malformed_response_error("sample: entry is not -1 or +1");
      }
      z.set(i, row[i].get<int>());
    }
    out.push_back(std::move(z));
  }
  return out;
}

struct RemoteOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{60000};
};

// JSON-over-HTTP client. Weights are scaled to the server's advertised
// ranges before sending. One HTTP client is created per request so
// independent runs can share an instance.
class RemoteSampler final : public Sampler {
public:
  explicit RemoteSampler(std::string endpoint, RemoteOptions options = {})
      : options_(options) {
    auto scheme = endpoint.find("://");
    const std::size_t host_begin = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = endpoint.find('/', host_begin);
    if (slash == std::string::npos) {
      origin_ = endpoint;
    } else {
      origin_ = endpoint.substr(0, slash);
      prefix_ = endpoint.substr(slash);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
    if (scheme == std::string::npos) origin_ = "http://" + origin_;
    if (origin_.size() <= 7) throw validation_error("remote sampler: invalid endpoint '" + endpoint + "'");
  }

  std::string name() const override { return "remote:" + origin_ + prefix_; }

  RemoteInfo info() const {
    std::lock_guard lock(mutex_);
    if (!info_) {
      auto client = make_client();
      auto res = client.Get(prefix_ + "/info");
      if (!res) throw transport_error("GET /info: " + httplib::to_string(res.error()));
      if (res->status != 200) {
        throw malformed_response_error("GET /info: HTTP status " + std::to_string(res->status));
      }
      info_ = parse_remote_info(res->body);
    }
    return *info_;
  }

  std::vector<SpinVector> sample(const WeightMatrix& theta, std::size_t k, Rng&) const override {
    const auto caps = info();
    if (caps.max_nodes != 0 && theta.size() > caps.max_nodes) {
      throw dimension_mismatch_error("remote sampler accepts at most " + std::to_string(caps.max_nodes) +
                                     " nodes, got " + std::to_string(theta.size()));
    }
    const auto request = remote_request(scale_to_ranges(theta, caps.delta, caps.gamma), k);
    auto client = make_client();
    auto res = client.Post(prefix_ + "/sample", request.dump(), "application/json");
    if (!res) throw transport_error("POST /sample: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw malformed_response_error("POST /sample: HTTP status " + std::to_string(res->status));
    }
    auto reads = parse_remote_samples(res->body, theta.size());
    if (reads.size() != k) {
      throw malformed_response_error("POST /sample: " + std::to_string(reads.size()) +
                                     " samples, requested " + std::to_string(k));
    }
    return reads;
  }

private:
  httplib::Client make_client() const {
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.read_timeout);
    return client;
  }

  std::string origin_;
  std::string prefix_;
  RemoteOptions options_;
  mutable std::mutex mutex_;
  mutable std::optional<RemoteInfo> info_;
};

}  // namespace qals
