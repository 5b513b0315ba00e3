#include "fkp/api.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "fkp/interchange.hpp"

namespace fkp {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    if (next > pos) parts.push_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

ApiResponse json_response(int status, const json& body) { return {status, "application/json", body.dump(2) + "\n"}; }

std::size_t page_param(const ApiRequest& req, const char* key, std::size_t fallback) {
  auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) return fallback;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), value);
  if (ec != std::errc{} || ptr != it->second.data() + it->second.size())
    throw Error(ErrorCode::invalid_argument, std::string("query parameter '") + key + "' must be a non-negative integer");
  return value;
}

/// Applies offset/limit (default 50, max 500) to `items`.
json paginate(const ApiRequest& req, const std::vector<json>& items) {
  const auto offset = page_param(req, "offset", 0);
  const auto limit = std::min(page_param(req, "limit", kDefaultPageSize), kMaxPageSize);
  json page = json::array();
  for (std::size_t i = offset; i < items.size() && i < offset + limit; ++i) page.push_back(items[i]);
  return {{"items", std::move(page)}, {"total", items.size()}, {"offset", offset}, {"limit", limit}};
}

json network_view(const CatalogEntry& entry) {
  json j = to_json(entry.network());
  j["site_count"] = entry.document.sites.size();
  json links = json::array();
  for (const auto& l : entry.document.dataset_links) links.push_back(to_json(l));
  j["dataset_links"] = std::move(links);
  return j;
}

bool can_manage(const Principal& p, const CatalogEntry& entry) {
  return p.role == Role::admin || (p.role == Role::contributor && entry.owner == p.id);
}

bool can_view(const Principal& p, const CatalogEntry& entry) {
  return !entry.deleted && (entry.network().published || can_manage(p, entry));
}

class Router {
 public:
  Router(Portal& portal, const TokenStore& tokens, const ApiRequest& req) : portal_(portal), tokens_(tokens), req_(req) {}

  ApiResponse route() {
    const auto parts = split_path(req_.path);
    const auto& m = req_.method;
    const auto n = parts.size();
    auto at = [&](std::size_t i, const char* s) { return i < n && parts[i] == s; };

    if (at(0, "networks")) {
      if (n == 1 && m == "GET") return list_networks();
      if (n == 1 && m == "POST") return create_network();
      if (n == 2 && m == "GET") return get_network(parts[1]);
      if (n == 2 && m == "DELETE") return delete_network(parts[1]);
      if (n == 3 && at(2, "sites") && m == "GET") return list_sites(parts[1]);
      if (n == 3 && at(2, "publish") && m == "POST") return publish(parts[1]);
      if (n == 3 && at(2, "assess") && m == "POST") return assess(parts[1]);
      if (n == 3 && at(2, "assessment") && m == "GET") return get_assessment(parts[1]);
      if (n == 3 && at(2, "deposits") && m == "POST") return deposit(parts[1]);
    } else if (at(0, "sites")) {
      if (n == 2 && m == "GET") return get_site(parts[1]);
      if (n == 3 && at(2, "sensors") && m == "GET") return list_sensors(parts[1]);
    } else if (at(0, "search") && n == 1 && m == "GET") {
      return search();
    } else if (at(0, "analytics")) {
      if (n == 2 && at(1, "summary") && m == "GET") return json_response(200, to_json(portal_.summary()));
      if (n == 2 && at(1, "cube") && m == "POST") return cube();
    } else if (at(0, "vocabulary") && n == 1 && m == "GET") {
      const auto& v = portal_.catalog().vocabulary();
      return json_response(200, {{"variables", v.variables()},
                                 {"keywords", v.keywords()},
                                 {"local_environments", {"urban", "suburban", "rural"}},
                                 {"seasons", {"winter", "spring", "summer", "autumn"}}});
    }
    return error_response(ErrorCode::not_found, "no route for " + m + " " + req_.path);
  }

 private:
  Principal principal() const {
    auto it = req_.headers.find("authorization");
    if (it == req_.headers.end()) return {};
    constexpr std::string_view kBearer = "Bearer ";
    if (it->second.rfind(kBearer, 0) != 0) throw Error(ErrorCode::unauthorized, "expected a bearer token");
    auto p = tokens_.find(it->second.substr(kBearer.size()));
    if (!p) throw Error(ErrorCode::unauthorized, "unknown token");
    return *p;
  }

  Principal writer() const {
    auto p = principal();
    if (p.anonymous()) throw Error(ErrorCode::unauthorized, "this operation requires an authenticated token");
    return p;
  }

  /// The entry if the caller may see it; not-found otherwise (drafts stay hidden).
  std::pair<SnapshotPtr, const CatalogEntry*> visible(const std::string& id, const Principal& p) const {
    auto snap = portal_.catalog().snapshot();
    const auto* entry = snap->find(id);
    if (!entry || !can_view(p, *entry)) throw Error(ErrorCode::not_found, "network '" + id + "' not found");
    return {snap, entry};
  }

  void require_manage(const std::string& id, const Principal& p) const {
    auto [snap, entry] = visible(id, p);
    if (!can_manage(p, *entry)) throw Error(ErrorCode::forbidden, "only an admin or the owner may do this");
  }

  ApiResponse list_networks() {
    auto snap = portal_.catalog().snapshot();
    std::vector<json> items;
    for (const auto& [_, entry] : snap->networks)
      if (entry->visible()) items.push_back(network_view(*entry));
    return json_response(200, paginate(req_, items));
  }

  ApiResponse create_network() {
    const auto p = writer();
    auto doc = parse_document(req_.body);
    if (!doc.network.id.empty()) {
      auto snap = portal_.catalog().snapshot();
      if (const auto* existing = snap->find(doc.network.id); existing && !can_manage(p, *existing))
        throw Error(ErrorCode::forbidden, "network '" + doc.network.id + "' belongs to another principal");
    }
    auto result = portal_.catalog().upsert_network(std::move(doc), p.id);
    const char* status = result.status == UpsertStatus::created ? "created"
                         : result.status == UpsertStatus::updated ? "updated" : "unchanged";
    return json_response(result.status == UpsertStatus::created ? 201 : 200,
                         {{"id", result.id}, {"status", status}, {"revision", result.revision}});
  }

  ApiResponse get_network(const std::string& id) {
    auto [snap, entry] = visible(id, principal());
    return json_response(200, network_view(*entry));
  }

  ApiResponse delete_network(const std::string& id) {
    const auto p = writer();
    require_manage(id, p);
    auto status = portal_.catalog().remove(id);
    return json_response(200, {{"id", id}, {"status", status == RemoveStatus::tombstoned ? "tombstoned" : "deleted"}});
  }

  ApiResponse list_sites(const std::string& id) {
    auto [snap, entry] = visible(id, principal());
    std::vector<json> items;
    for (const auto& s : entry->document.sites) items.push_back(to_json(s));
    return json_response(200, paginate(req_, items));
  }

  ApiResponse get_site(const std::string& site_id) {
    const auto p = principal();
    auto snap = portal_.catalog().snapshot();
    const auto* site = snap->find_site(site_id);
    const auto* entry = site ? snap->find(site->network_id) : nullptr;
    if (!entry || !can_view(p, *entry)) throw Error(ErrorCode::not_found, "site '" + site_id + "' not found");
    json j = to_json(*site);
    j["network_name"] = entry->network().name;
    return json_response(200, j);
  }

  ApiResponse list_sensors(const std::string& site_id) {
    const auto p = principal();
    auto snap = portal_.catalog().snapshot();
    const auto* site = snap->find_site(site_id);
    const auto* entry = site ? snap->find(site->network_id) : nullptr;
    if (!entry || !can_view(p, *entry)) throw Error(ErrorCode::not_found, "site '" + site_id + "' not found");
    std::vector<json> items;
    for (const auto& s : entry->document.sensors)
      if (s.site_id == site_id) items.push_back(to_json(s));
    return json_response(200, paginate(req_, items));
  }

  ApiResponse search() {
    auto query = query_from_params(req_.query);
    std::vector<json> items;
    for (const auto& r : portal_.search().search(query)) items.push_back(to_json(r));
    return json_response(200, paginate(req_, items));
  }

  ApiResponse publish(const std::string& id) {
    const auto p = writer();
    require_manage(id, p);
    portal_.catalog().publish(id);
    auto snap = portal_.catalog().snapshot();
    return json_response(200, network_view(*snap->find(id)));
  }

  ApiResponse assess(const std::string& id) {
    const auto p = writer();
    require_manage(id, p);
    auto it = req_.query.find("offline");
    const bool offline = it != req_.query.end() && (it->second == "1" || it->second == "true");
    return json_response(200, to_json(portal_.assess(id, offline)));
  }

  ApiResponse get_assessment(const std::string& id) {
    auto [snap, entry] = visible(id, principal());
    if (!entry->assessment) throw Error(ErrorCode::not_found, "network '" + id + "' has not been assessed");
    return json_response(200, to_json(*entry->assessment));
  }

  ApiResponse deposit(const std::string& id) {
    const auto p = writer();
    require_manage(id, p);
    DepositRequest request;
    json meta = json::object();
    for (const auto& part : req_.form) {
      if (part.name == "metadata" && part.filename.empty()) {
        try {
          meta = json::parse(part.content);
        } catch (const json::exception& e) {
          throw Error(ErrorCode::invalid_argument, std::string("metadata part is not JSON: ") + e.what());
        }
      } else if (!part.filename.empty()) {
        request.files.push_back({part.filename, part.content});
      }
    }
    if (request.files.empty()) throw Error(ErrorCode::invalid_argument, "multipart body carries no file part");
    try {
      request.metadata.title = meta.value("title", "");
      request.metadata.description = meta.value("description", "");
      request.metadata.creators = meta.value("creators", std::vector<std::string>{});
      if (meta.contains("license")) request.metadata.license = meta.at("license").get<std::string>();
      if (meta.contains("idempotency_token"))
        request.metadata.idempotency_token = meta.at("idempotency_token").get<std::string>();
      if (meta.contains("file_format")) request.file_format = meta.at("file_format").get<std::string>();
      if (meta.contains("temporal_coverage")) request.temporal_coverage = date_range_from_json(meta.at("temporal_coverage"));
      if (meta.contains("sampling_interval_s")) request.sampling_interval = Seconds{meta.at("sampling_interval_s").get<std::int64_t>()};
      if (meta.contains("declared_record_count"))
        request.declared_record_count = meta.at("declared_record_count").get<std::int64_t>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_argument, std::string("malformed deposit metadata: ") + e.what());
    }
    auto outcome = portal_.deposit(id, request);
    return json_response(201, {{"deposit_id", outcome.deposit_id}, {"doi", outcome.doi}, {"dataset_link", to_json(outcome.link)}});
  }

  ApiResponse cube() {
    json body;
    try {
      body = json::parse(req_.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_argument, std::string("cube query is not JSON: ") + e.what());
    }
    auto result = portal_.cube(cube_query_from_json(body));
    auto it = req_.query.find("format");
    if (it != req_.query.end() && it->second == "csv") return {200, "text/csv", to_csv(result)};
    return json_response(200, to_json(result));
  }

  Portal& portal_;
  const TokenStore& tokens_;
  const ApiRequest& req_;
};

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::reader: return "reader";
    case Role::contributor: return "contributor";
    case Role::admin: return "admin";
  }
  return "reader";
}

TokenStore TokenStore::parse(const std::string& text) {
  TokenStore store;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string token, role, name;
    if (!(fields >> token)) continue;
    if (!(fields >> role)) throw Error(ErrorCode::parse_error, "token file line " + std::to_string(line_no) + ": missing role");
    fields >> name;
    Role r;
    if (role == "admin") r = Role::admin;
    else if (role == "contributor") r = Role::contributor;
    else throw Error(ErrorCode::parse_error, "token file line " + std::to_string(line_no) + ": unknown role '" + role + "'");
    store.add(token, {name.empty() ? "principal-" + std::to_string(line_no) : name, r});
  }
  return store;
}

TokenStore TokenStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read token file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void TokenStore::add(std::string token, Principal principal) { tokens_[std::move(token)] = std::move(principal); }

std::optional<Principal> TokenStore::find(const std::string& token) const {
  auto it = tokens_.find(token);
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::parse_error: return 400;
    case ErrorCode::unauthorized: return 401;
    case ErrorCode::forbidden: return 403;
    case ErrorCode::not_found: return 404;
    case ErrorCode::version_conflict:
    case ErrorCode::state: return 409;
    case ErrorCode::validation_failed:
    case ErrorCode::integrity: return 422;
    case ErrorCode::transport:
    case ErrorCode::permanent: return 502;
    case ErrorCode::io: return 500;
  }
  return 500;
}

ApiResponse error_response(ErrorCode code, const std::string& message, json details) {
  return json_response(http_status(code), {{"code", to_string(code)}, {"message", message}, {"details", std::move(details)}});
}

ApiHandler::ApiHandler(Portal& portal, TokenStore tokens) : portal_(portal), tokens_(std::move(tokens)) {}

ApiResponse ApiHandler::handle(const ApiRequest& request) {
  try {
    return Router(portal_, tokens_, request).route();
  } catch (const ValidationError& e) {
    json issues = json::array();
    for (const auto& i : e.report().issues)
      issues.push_back({{"severity", i.severity == Severity::error ? "error" : "warning"}, {"code", i.code}, {"message", i.message}});
    return error_response(e.code(), e.what(), {{"issues", issues}});
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(ErrorCode::io, std::string("internal error: ") + e.what());
  }
}

ServiceConfig service_config_from_env(ServiceConfig base) {
  if (const char* port = std::getenv("PORT"); port && *port) base.port = std::atoi(port);
  if (const char* dir = std::getenv("DATA_DIR"); dir && *dir) base.portal.data_dir = dir;
  if (const char* tokens = std::getenv("TOKEN_FILE"); tokens && *tokens) base.token_file = tokens;
  return base;
}

struct HttpServer::Impl {
  ApiHandler& handler;
  httplib::Server server;

  explicit Impl(ApiHandler& h) : handler(h) {
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query[k] = v;
      for (const auto& [k, v] : req.headers) {
        std::string key = k;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        r.headers[key] = v;
      }
      r.body = req.body;
      for (const auto& [name, file] : req.files) r.form.push_back({name, file.filename, file.content});
      auto out = handler.handle(r);
      res.status = out.status;
      res.set_content(out.body, out.content_type);
    };
    const std::string any = "/.*";
    server.Get(any, dispatch);
    server.Post(any, dispatch);
    server.Delete(any, dispatch);
  }
};

HttpServer::HttpServer(ApiHandler& handler) : impl_(std::make_unique<Impl>(handler)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::io, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace fkp
