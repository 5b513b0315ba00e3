#pragma once

// HTTP surface of the portal. ApiHandler is transport independent (requests
// and responses are plain values); HttpServer binds it to cpp-httplib.
//
// Reads are public for published records. Every mutating endpoint needs a
// bearer token from the token file; publish/assess/deposit/delete further
// need the admin role or ownership of the network.

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkp/portal.hpp"

namespace fkp {

enum class Role { reader, contributor, admin };
std::string_view to_string(Role role);

struct Principal {
  std::string id;
  Role role = Role::reader;

  bool anonymous() const { return role == Role::reader; }
};

/// Static token file: one `<token> <role> [<principal-name>]` per line;
/// blank lines and `#` comments ignored. Roles: contributor, admin.
class TokenStore {
 public:
  TokenStore() = default;
  static TokenStore load(const std::filesystem::path& path);
  static TokenStore parse(const std::string& text);

  void add(std::string token, Principal principal);
  std::optional<Principal> find(const std::string& token) const;

 private:
  std::map<std::string, Principal, std::less<>> tokens_;
};

struct FormPart {
  std::string name;
  std::string filename;  // empty for plain fields
  std::string content;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
  std::vector<FormPart> form;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

inline constexpr std::size_t kDefaultPageSize = 50;
inline constexpr std::size_t kMaxPageSize = 500;

class ApiHandler {
 public:
  ApiHandler(Portal& portal, TokenStore tokens);

  ApiResponse handle(const ApiRequest& request);

 private:
  Portal& portal_;
  TokenStore tokens_;
};

/// Maps ErrorCode to an HTTP status.
int http_status(ErrorCode code);
ApiResponse error_response(ErrorCode code, const std::string& message, nlohmann::json details = nullptr);

struct ServiceConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  PortalConfig portal;
  std::optional<std::filesystem::path> token_file;
};

/// Reads PORT, DATA_DIR, TOKEN_FILE over the given defaults.
ServiceConfig service_config_from_env(ServiceConfig base = {});

class HttpServer {
 public:
  explicit HttpServer(ApiHandler& handler);
  ~HttpServer();

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  /// Throws Error{io} when the port is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fkp
