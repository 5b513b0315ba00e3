// fkp: command line front end of the knowledge portal.
//
// Every subcommand works on the data directory given by --data-dir (or
// DATA_DIR). Failures print one line `error: <code>: <message>` to stderr
// and exit 1.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fkp/api.hpp"
#include "fkp/demo.hpp"
#include "fkp/interchange.hpp"

namespace {

fkp::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fkp::Error(fkp::ErrorCode::io, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw fkp::Error(fkp::ErrorCode::io, "cannot write " + path);
}

fkp::WritePolicy parse_policy(const std::string& s) {
  if (s == "authenticated") return fkp::WritePolicy::authenticated;
  if (s == "audited-open") return fkp::WritePolicy::audited_open;
  if (s == "open") return fkp::WritePolicy::open;
  throw fkp::Error(fkp::ErrorCode::invalid_argument, "unknown write policy '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metadata catalog for micrometeorological station networks"};
  app.require_subcommand(1);

  fkp::ServiceConfig config = fkp::service_config_from_env();
  std::string data_dir = config.portal.data_dir ? config.portal.data_dir->string() : "data";
  std::string vocabulary_file, rubric_file, policy = "authenticated";
  app.add_option("--data-dir", data_dir, "catalog directory (env DATA_DIR)");
  app.add_option("--vocabulary", vocabulary_file, "controlled vocabulary JSON");
  app.add_option("--rubric", rubric_file, "FAIR rubric JSON");
  app.add_option("--write-policy", policy, "authenticated | audited-open | open (FAIR A3 evidence)");

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  std::string token_file = config.token_file ? config.token_file->string() : "";
  serve->add_option("--host", config.host);
  serve->add_option("--port", config.port, "env PORT");
  serve->add_option("--tokens", token_file, "token file (env TOKEN_FILE)");

  std::string path;
  auto* import = app.add_subcommand("import", "import network documents or a catalog export");
  import->add_option("path", path)->required();
  std::string owner;
  import->add_option("--owner", owner);

  auto* export_cmd = app.add_subcommand("export", "write the catalog as JSON ('-' for stdout)");
  export_cmd->add_option("path", path)->required();

  app.add_subcommand("seed-demo", "load and publish the bundled demonstration network");

  std::string network_id;
  bool offline = false;
  auto* assess = app.add_subcommand("assess", "run the FAIR assessment and store it");
  assess->add_option("network-id", network_id)->required();
  assess->add_flag("--offline", offline, "skip DOI resolution");
  bool json_out = false;
  assess->add_flag("--json", json_out);

  auto* publish = app.add_subcommand("publish", "make a network publicly visible");
  publish->add_option("network-id", network_id)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    config.portal.data_dir = data_dir;
    if (!vocabulary_file.empty()) config.portal.vocabulary_file = vocabulary_file;
    if (!rubric_file.empty()) config.portal.rubric_file = rubric_file;
    config.portal.write_policy = parse_policy(policy);
    fkp::Portal portal(config.portal);

    if (*serve) {
      auto tokens = token_file.empty() ? fkp::TokenStore{} : fkp::TokenStore::load(token_file);
      fkp::ApiHandler handler(portal, std::move(tokens));
      fkp::HttpServer server(handler);
      const int port = server.bind(config.host, config.port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << config.host << ":" << port << std::endl;
      server.listen();
      g_server = nullptr;
    } else if (*import) {
      const auto text = read_file(path);
      auto parsed = nlohmann::json::parse(text, nullptr, false);
      fkp::ImportReport report;
      if (parsed.is_object() && parsed.contains("format")) {
        // A single interchange document is upserted like an API submission.
        auto result = portal.catalog().upsert_network(fkp::document_from_json(parsed), owner);
        report.items.push_back({0, result.id, std::nullopt});
      } else {
        report = portal.catalog().import_text(text);
      }
      for (const auto& item : report.items) {
        if (item.error)
          std::cout << "failed " << item.index << " " << *item.error << "\n";
        else
          std::cout << "imported " << item.index << " " << item.id.value_or("") << "\n";
      }
      std::cout << "imported=" << report.succeeded() << " failed=" << report.failed() << "\n";
      return report.failed() == 0 ? 0 : 1;
    } else if (*export_cmd) {
      write_file(path, portal.catalog().export_text());
    } else if (app.got_subcommand("seed-demo")) {
      auto result = portal.catalog().upsert_network(fkp::demo::novi_sad_network(), "demo");
      portal.catalog().publish(result.id);
      std::cout << "seeded " << result.id << "\n";
    } else if (*assess) {
      auto result = portal.assess(network_id, offline);
      std::cout << (json_out ? fkp::to_json(result).dump(2) + "\n" : fkp::render_text(result));
    } else if (*publish) {
      auto network = portal.catalog().publish(network_id);
      std::cout << "published " << network.id << "\n";
    }
    return 0;
  } catch (const fkp::ValidationError& e) {
    std::cerr << "error: " << fkp::to_string(e.code()) << ": " << e.what() << "\n";
    for (const auto& issue : e.report().issues)
      std::cerr << "  " << (issue.severity == fkp::Severity::error ? "error " : "warning ") << issue.code << ": "
                << issue.message << "\n";
    return 1;
  } catch (const fkp::Error& e) {
    std::cerr << "error: " << fkp::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 1;
  }
}
