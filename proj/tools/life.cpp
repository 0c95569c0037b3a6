// Administrative command-line front end: server, users, projects, import,
// export and glosser training.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "life/codec.hpp"
#include "life/error.hpp"
#include "life/glosser.hpp"
#include "life/service.hpp"
#include "life/text.hpp"

namespace {

using life::codec::Json;
namespace svc = life::service;

struct Globals {
  std::string config_file;
  std::string data_dir;
  std::string kdf;
};

svc::ServiceConfig resolve_config(const Globals& g) {
  svc::ServiceConfig c = g.config_file.empty() ? svc::ServiceConfig{} : svc::load_config(g.config_file);
  svc::apply_env_overrides(c);
  if (!g.data_dir.empty()) c.data_dir = g.data_dir;
  if (!g.kdf.empty()) c.kdf = g.kdf;
  return c;
}

std::shared_ptr<life::store::DocumentStore> open_data(const svc::ServiceConfig& c) {
  if (c.data_dir.empty()) {
    throw life::Error(life::ErrorCode::InvalidArgument, "no data directory: pass --data-dir or set data_dir");
  }
  return svc::open_store(c);
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw life::Error(life::ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw life::Error(life::ErrorCode::Io, "cannot write " + path);
  }
}

life::Project project_by_slug(const life::store::DocumentStore& store, const std::string& slug) {
  life::store::QueryFilter f;
  f.field_equals.emplace_back("slug", slug);
  const auto docs = store.scan("projects", f);
  if (docs.empty()) throw life::Error(life::ErrorCode::NotFound, "no project with slug '" + slug + "'");
  life::Project p = life::codec::project_from_json(docs.front().json());
  p.rev = docs.front().rev;
  return p;
}

std::vector<std::string> split_units(const std::string& s) {
  std::vector<std::string> out;
  for (std::string_view unit : life::text::split_ws(s)) out.push_back(life::text::nfc(unit));
  return out;
}

int run_serve(const Globals& g) {
  svc::ServiceConfig c = resolve_config(g);
  std::shared_ptr<life::store::DocumentStore> store = svc::open_store(c);
  svc::Service service(store, c);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    svc::stop_server();
  });
  waiter.detach();

  std::cerr << "life: listening on " << c.host << ":" << c.port
            << (c.data_dir.empty() ? " (in-memory store)" : " data_dir=" + c.data_dir) << "\n";
  svc::serve(service);
  return 0;
}

int run_user_add(const Globals& g, const std::string& name, std::string password, const std::string& email) {
  svc::ServiceConfig c = resolve_config(g);
  auto store = open_data(c);
  if (password.empty()) {
    std::getline(std::cin, password);
    if (!password.empty() && password.back() == '\r') password.pop_back();
  }
  life::auth::AuthOptions options;
  options.kdf = life::auth::KdfProfile::named(c.kdf);
  life::auth::Authenticator auth(store, options);
  const life::User u = auth.create_user(name, password, email.empty() ? std::nullopt : std::optional(email));
  std::cout << u.id << "\n";
  return 0;
}

struct ProjectArgs {
  std::string name, slug, code, language, owner, alphabet, pos;
};

int run_project_create(const Globals& g, const ProjectArgs& a) {
  svc::ServiceConfig c = resolve_config(g);
  auto store = open_data(c);
  life::store::QueryFilter by_name;
  by_name.field_equals.emplace_back("username", a.owner);
  const auto users = store->scan("users", by_name);
  if (users.empty()) throw life::Error(life::ErrorCode::NotFound, "no user '" + a.owner + "'");
  const life::User owner = life::codec::user_from_json(users.front().json());

  life::Project p;
  p.id = life::new_id();
  p.name = a.name;
  p.slug = a.slug.empty() ? life::slugify(a.name) : a.slug;
  p.language_code = a.code;
  p.language_name = a.language.empty() ? a.name : a.language;
  p.alphabet = split_units(a.alphabet);
  p.pos_inventory = split_units(a.pos);
  p.members[owner.id] = life::Role::Owner;
  p.created_at = life::now_rfc3339();
  const life::ValidationReport report = life::validate_project(p);
  if (!report.ok) {
    std::cerr << life::codec::canonical(life::codec::to_json(report)) << "\n";
    return 1;
  }
  life::store::QueryFilter f;
  f.field_equals.emplace_back("slug", p.slug);
  if (!store->scan("projects", f).empty()) {
    throw life::Error(life::ErrorCode::Conflict, "slug '" + p.slug + "' is already used");
  }
  store->put("projects", life::codec::to_json(p));
  std::cout << p.id << "\n";
  return 0;
}

int run_import(const Globals& g, const std::string& slug, const std::string& format, const std::string& file) {
  svc::ServiceConfig c = resolve_config(g);
  auto store = open_data(c);
  const life::Project p = project_by_slug(*store, slug);
  svc::ImportOptions opt;
  opt.title = std::filesystem::path(file).stem().string();
  const Json summary = svc::import_into_project(*store, p, format, read_input(file), opt);
  std::cout << summary.dump(2) << "\n";
  return summary["skipped"].empty() ? 0 : 2;
}

int run_export(const Globals& g, const std::string& slug, const std::string& format, const std::string& out) {
  svc::ServiceConfig c = resolve_config(g);
  auto store = open_data(c);
  const svc::ExportedFile file = svc::export_project(*store, project_by_slug(*store, slug), format, c.base_iri);
  write_output(out, file.body);
  if (file.mapping_warnings) std::cerr << "life: " << file.mapping_warnings << " mapping warnings\n";
  return 0;
}

int run_gloss_train(const Globals& g, const std::string& slug) {
  svc::ServiceConfig c = resolve_config(g);
  auto store = open_data(c);
  svc::Service service(store, c);
  const life::Project p = project_by_slug(*store, slug);
  const std::int64_t version = service.retrain(p.id);
  const auto model = service.model(p.id);
  std::cout << "version " << version << ", " << model->trained_on << " utterances, "
            << model->morph_counts.size() << " morph forms\n";
  return 0;
}

// Holds out every k-th glossed utterance, trains on the rest.
int run_gloss_eval(const Globals& g, const std::string& slug, std::size_t every) {
  svc::ServiceConfig c = resolve_config(g);
  auto store = open_data(c);
  const life::Project p = project_by_slug(*store, slug);
  std::vector<life::Utterance> train, heldout;
  std::size_t glossed = 0;
  for (auto& u : svc::project_utterances(*store, p.id)) {
    const bool has_gloss = std::any_of(u.words.begin(), u.words.end(), [](const life::Word& w) {
      return std::any_of(w.morphs.begin(), w.morphs.end(), [](const life::Morph& m) { return !m.gloss.empty(); });
    });
    if (has_gloss && ++glossed % every == 0) {
      heldout.push_back(std::move(u));
    } else {
      train.push_back(std::move(u));
    }
  }
  const auto model = life::gloss::train(train, svc::project_entries(*store, p.id), p.id);
  const life::gloss::Metrics m = life::gloss::evaluate(model, heldout);
  std::cout << life::gloss::to_json(m).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"life: linguistic field data manager"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_file, "settings file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--data-dir", g.data_dir, "store directory (overrides the config)");
  app.add_option("--kdf", g.kdf, "password hashing cost: interactive, moderate or min");

  auto* serve = app.add_subcommand("serve", "run the HTTP API and static UI");

  auto* user = app.add_subcommand("user", "manage user accounts")->require_subcommand(1);
  auto* user_add = user->add_subcommand("add", "create a user; the password is read from stdin unless given");
  std::string user_name, password, email;
  user_add->add_option("name", user_name)->required();
  user_add->add_option("--password", password);
  user_add->add_option("--email", email);

  auto* project = app.add_subcommand("project", "manage projects")->require_subcommand(1);
  auto* project_create = project->add_subcommand("create", "create a project owned by an existing user");
  ProjectArgs pa;
  project_create->add_option("--name", pa.name)->required();
  project_create->add_option("--slug", pa.slug, "defaults to a slug of the name");
  project_create->add_option("--code", pa.code, "ISO 639-3 language code")->required();
  project_create->add_option("--language", pa.language, "language name");
  project_create->add_option("--owner", pa.owner, "username")->required();
  project_create->add_option("--alphabet", pa.alphabet, "space-separated collation units, e.g. \"a b ch d\"");
  project_create->add_option("--pos", pa.pos, "space-separated part-of-speech inventory");

  std::string slug, format, file, out;
  auto* import = app.add_subcommand("import", "load sfm, csv, json or igt data into a project");
  import->add_option("--project", slug, "project slug")->required();
  import->add_option("--format", format)->required()->check(CLI::IsMember({"sfm", "json", "csv", "igt"}));
  import->add_option("file", file, "input file or - for stdin")->required();

  auto* exp = app.add_subcommand("export", "write a project in one of the export formats");
  exp->add_option("--project", slug, "project slug")->required();
  exp->add_option("--format", format)->required()->check(CLI::IsMember(svc::export_formats()));
  exp->add_option("-o,--output", out, "output file (default stdout)");

  auto* gloss = app.add_subcommand("gloss", "glosser model")->require_subcommand(1);
  auto* gloss_train = gloss->add_subcommand("train", "retrain the project model");
  gloss_train->add_option("--project", slug, "project slug")->required();
  auto* gloss_eval = gloss->add_subcommand("eval", "held-out segmentation and gloss accuracy");
  std::size_t every = 5;
  gloss_eval->add_option("--project", slug, "project slug")->required();
  gloss_eval->add_option("--holdout-every", every, "hold out every k-th glossed utterance")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(g);
    if (*user_add) return run_user_add(g, user_name, password, email);
    if (*project_create) return run_project_create(g, pa);
    if (*import) return run_import(g, slug, format, file);
    if (*exp) return run_export(g, slug, format, out);
    if (*gloss_train) return run_gloss_train(g, slug);
    if (*gloss_eval) return run_gloss_eval(g, slug, every);
  } catch (const life::Error& e) {
    std::cerr << "life: " << life::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
