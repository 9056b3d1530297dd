#include "ggc/cas.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <regex>
#include <sstream>

#include "ggc/padics.hpp"

extern char** environ;

namespace ggc::cas {

namespace {

std::string with_raw(const std::string& what, const std::string& raw) {
  return what + "\n--- raw output ---\n" + raw;
}

// Defining polynomials are pasted into scripts, so only plain integer
// polynomial syntax in x is accepted.
const std::string& checked_poly(const std::string& poly) {
  static const std::regex ok(R"([0-9x^*+\- ]+)");
  if (!std::regex_match(poly, ok))
    throw Error(ErrorCode::TaskUnsupported, "defining polynomial has unsupported characters: " + poly);
  return poly;
}

const std::string& base_poly(const FieldRecord* base, const std::string& key) {
  if (!base || !base->defining_polynomials || !base->defining_polynomials->count(key))
    throw Error(ErrorCode::TaskUnsupported, "needs defining polynomial '" + key + "' in the base record");
  return checked_poly(base->defining_polynomials->at(key));
}

std::int64_t generator_prime(const std::string& label) {
  static const std::regex re(R"(p([0-9]{1,9}))");
  std::smatch m;
  if (!std::regex_match(label, m, re) || !is_prime(std::stoll(m[1].str())))
    throw Error(ErrorCode::TaskUnsupported, "generator label '" + label + "' is not of the form p<prime>");
  return std::stoll(m[1].str());
}

std::string preamble() {
  return "default(parisizemax, 2000000000);\n"
         "setrand(1);\n"
         "print(\"@@VERSION \", version());\n";
}

std::string block(const std::string& name, const std::string& expr) {
  return "print(\"@@BEGIN " + name + "\");\nprint(" + expr + ");\nprint(\"@@END " + name + "\");\n";
}

std::string kpoly(std::int64_t d) { return "x^2 + " + std::to_string(d); }

int p_exponent_sum(const std::vector<std::int64_t>& cyc, std::int64_t p, const std::string& raw) {
  int s = 0;
  for (std::int64_t c : cyc) {
    if (c <= 0) throw Error(ErrorCode::ParseFailure, with_raw("non-positive invariant", raw));
    s += vp(c, p).value();
  }
  return s;
}

const std::string& need_block(const EngineOutput& out, const std::string& name) {
  auto it = out.blocks.find(name);
  if (it == out.blocks.end()) throw Error(ErrorCode::ParseFailure, with_raw("missing block '" + name + "'", out.raw));
  return it->second;
}

std::string resolve(const std::string& path) {
  if (path.find('/') != std::string::npos) {
    if (access(path.c_str(), X_OK) == 0) return path;
    throw Error(ErrorCode::EngineMissing, "engine '" + path + "' is not executable");
  }
  const char* env = std::getenv("PATH");
  std::stringstream dirs(env ? env : "/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    const std::string candidate = (dir.empty() ? "." : dir) + "/" + path;
    if (access(candidate.c_str(), X_OK) == 0) return candidate;
  }
  throw Error(ErrorCode::EngineMissing, "engine '" + path + "' not found on PATH");
}

struct Fd {
  int fd = -1;
  ~Fd() { close_now(); }
  void close_now() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

}  // namespace

EngineConfig EngineConfig::from_env() {
  EngineConfig c;
  if (const char* p = std::getenv("GGC_ENGINE_PATH"); p && *p) c.path = p;
  if (const char* t = std::getenv("GGC_ENGINE_TIMEOUT"); t && *t) {
    char* end = nullptr;
    const long v = std::strtol(t, &end, 10);
    if (*end != '\0' || v <= 0) throw Error(ErrorCode::InvalidArgument, "GGC_ENGINE_TIMEOUT must be a positive integer");
    c.timeout = std::chrono::seconds(v);
  }
  return c;
}

std::optional<TaskKind> parse_task_kind(const std::string& name) {
  if (name == "class_group") return TaskKind::ClassGroup;
  if (name == "aux_class_number") return TaskKind::AuxClassNumber;
  if (name == "layer_class_numbers") return TaskKind::LayerClassNumbers;
  if (name == "capitulation") return TaskKind::Capitulation;
  return std::nullopt;
}

const char* task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::ClassGroup:
      return "class_group";
    case TaskKind::AuxClassNumber:
      return "aux_class_number";
    case TaskKind::LayerClassNumbers:
      return "layer_class_numbers";
    case TaskKind::Capitulation:
      return "capitulation";
  }
  return "?";
}

std::string generate_script(const Task& task, std::int64_t p, std::int64_t d, const FieldRecord* base) {
  std::string s = preamble();
  switch (task.kind) {
    case TaskKind::ClassGroup:
      s += "K = bnfinit(" + kpoly(d) + ", 1);\n";
      s += block("class_group", "K.cyc");
      break;
    case TaskKind::AuxClassNumber:
      if (p == 3) {
        s += "K = bnfinit(x^2 - " + std::to_string(3 * d) + ", 1);\n";
        s += block("real_quad_class_number", "K.no");
      } else {
        s += "K = bnfinit(polcompositum(" + kpoly(d) + ", polcyclo(" + std::to_string(p) + "))[1], 1);\n";
        s += block("k_zetap_class_number", "K.no");
      }
      break;
    case TaskKind::LayerClassNumbers:
      if (task.depth < 1) throw Error(ErrorCode::TaskUnsupported, "layer_class_numbers needs depth >= 1");
      s += "K = bnfinit(" + kpoly(d) + ", 1);\n";
      s += block("layer_0", "K.cyc");
      for (int n = 1; n <= task.depth; ++n) {
        const std::string key = task.tower + std::to_string(n);
        s += "L = bnfinit(" + base_poly(base, key) + ", 1);\n";
        s += block("layer_" + std::to_string(n), "L.cyc");
      }
      break;
    case TaskKind::Capitulation: {
      if (task.generators.empty()) throw Error(ErrorCode::TaskUnsupported, "capitulation needs generators");
      const std::string key = "N" + std::to_string(task.layer);
      s += "K = bnfinit(" + kpoly(d) + ", 1);\n";
      s += "L = bnfinit(" + base_poly(base, key) + ", 1);\n";
      s += "emb = nfisincl(" + kpoly(d) + ", L.pol)[1];\n";
      for (const auto& g : task.generators) {
        const std::string q = std::to_string(generator_prime(g));
        s += "P = idealprimedec(K, " + q + ")[1];\n";
        s += "J = idealhnf(L, " + q + ", subst(lift(nfbasistoalg(K, P.gen[2])), x, emb));\n";
        s += block("capitulation_" + g, "bnfisprincipal(L, J, 0) == 0");
      }
      break;
    }
  }
  s += "quit;\n";
  return s;
}

EngineOutput parse_output(const std::string& raw) {
  EngineOutput out;
  out.raw = raw;
  std::istringstream in(raw);
  std::string line;
  std::optional<std::string> open;
  std::string body;
  bool have_version = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find("***") != std::string::npos)
      throw Error(ErrorCode::ParseFailure, with_raw("engine reported an error", raw));
    if (line.rfind("@@VERSION ", 0) == 0) {
      out.version = line.substr(10);
      have_version = !out.version.empty();
    } else if (line.rfind("@@BEGIN ", 0) == 0) {
      if (open) throw Error(ErrorCode::ParseFailure, with_raw("nested block in '" + *open + "'", raw));
      open = line.substr(8);
      body.clear();
    } else if (line.rfind("@@END ", 0) == 0) {
      if (!open || line.substr(6) != *open)
        throw Error(ErrorCode::ParseFailure, with_raw("unmatched end marker '" + line + "'", raw));
      out.blocks[*open] = body;
      open.reset();
    } else if (open) {
      if (!body.empty()) body += "\n";
      body += line;
    }
  }
  if (open) throw Error(ErrorCode::ParseFailure, with_raw("unterminated block '" + *open + "'", raw));
  if (!have_version) throw Error(ErrorCode::ParseFailure, with_raw("no version line", raw));
  return out;
}

std::vector<std::int64_t> parse_integers(const std::string& block, const std::string& raw) {
  std::string t;
  for (char c : block)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
  std::vector<std::int64_t> out;
  if (t.empty()) return out;
  static const std::regex integer(R"(-?[0-9]{1,18})");
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!std::regex_match(item, integer))
      throw Error(ErrorCode::ParseFailure, with_raw("expected integers, got '" + block + "'", raw));
    out.push_back(std::stoll(item));
  }
  return out;
}

std::string run_engine(const EngineConfig& config, const std::string& script) {
  const std::string exe = resolve(config.path);

  int in_pipe[2], out_pipe[2];
  if (pipe2(in_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::Io, std::strerror(errno));
  Fd in_r{in_pipe[0]}, in_w{in_pipe[1]};
  if (pipe2(out_pipe, O_CLOEXEC) != 0) throw Error(ErrorCode::Io, std::strerror(errno));
  Fd out_r{out_pipe[0]}, out_w{out_pipe[1]};

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_r.fd, 0);
  posix_spawn_file_actions_adddup2(&actions, out_w.fd, 1);
  posix_spawn_file_actions_adddup2(&actions, out_w.fd, 2);
  std::vector<std::string> args = {exe, "-q", "-f"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw Error(ErrorCode::EngineMissing, "cannot start '" + exe + "': " + std::strerror(rc));
  in_r.close_now();
  out_w.close_now();

  // A child that exits early must not kill us with SIGPIPE.
  sigset_t block_pipe, old_mask;
  sigemptyset(&block_pipe);
  sigaddset(&block_pipe, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &block_pipe, &old_mask);

  fcntl(in_w.fd, F_SETFL, O_NONBLOCK);
  const auto deadline = std::chrono::steady_clock::now() + config.timeout;
  std::string output;
  std::size_t written = 0;
  bool timed_out = false;
  char buf[4096];
  while (out_r.fd >= 0) {
    if (in_w.fd >= 0 && written == script.size()) in_w.close_now();
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd fds[2];
    int n = 0;
    fds[n++] = {out_r.fd, POLLIN, 0};
    if (in_w.fd >= 0) fds[n++] = {in_w.fd, POLLOUT, 0};
    const int ready = poll(fds, static_cast<nfds_t>(n), static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t got = ::read(out_r.fd, buf, sizeof buf);
      if (got > 0)
        output.append(buf, static_cast<std::size_t>(got));
      else if (got == 0 || errno != EINTR)
        out_r.close_now();
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t put = ::write(in_w.fd, script.data() + written, script.size() - written);
      if (put > 0)
        written += static_cast<std::size_t>(put);
      else if (errno != EAGAIN && errno != EINTR)
        in_w.close_now();  // child stopped reading; keep collecting output
    }
  }
  in_w.close_now();
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  timespec zero{0, 0};
  while (sigtimedwait(&block_pipe, nullptr, &zero) > 0) {
  }
  pthread_sigmask(SIG_SETMASK, &old_mask, nullptr);

  if (timed_out)
    throw Error(ErrorCode::Timeout, "engine exceeded " + std::to_string(config.timeout.count()) + " s");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw Error(ErrorCode::ParseFailure,
                with_raw("engine exited abnormally (status " + std::to_string(status) + ")", output));
  return output;
}

FieldRecord cas_fetch(std::int64_t p, std::int64_t d, const std::vector<Task>& tasks, const EngineConfig& config,
                      const FieldRecord* base) {
  FieldRecord r;
  r.p = p;
  r.d = d;
  if (!is_prime(p) || !p_splits(p, d))
    throw Error(ErrorCode::SplitCondition,
                std::to_string(p) + " does not split in Q(sqrt(-" + std::to_string(d) + "))");
  (void)resolve(config.path);

  for (const Task& task : tasks) {
    const std::string script = generate_script(task, p, d, base);
    const EngineOutput out = parse_output(run_engine(config, script));
    const Provenance prov{"cas", out.version, script};
    switch (task.kind) {
      case TaskKind::ClassGroup: {
        std::vector<int> exps;
        for (std::int64_t c : parse_integers(need_block(out, "class_group"), out.raw)) {
          const int e = p_exponent_sum({c}, p, out.raw);
          if (e > 0) exps.push_back(e);
        }
        std::sort(exps.rbegin(), exps.rend());
        int s = 0;
        for (int e : exps) s += e;
        r.class_group_k = exps;
        r.s_exp = s;
        r.provenance["class_group_k"] = prov;
        r.provenance["s_exp"] = prov;
        break;
      }
      case TaskKind::AuxClassNumber: {
        HilbertAux h = r.hilbert_aux.value_or(HilbertAux{});
        const std::string name = p == 3 ? "real_quad_class_number" : "k_zetap_class_number";
        const auto v = parse_integers(need_block(out, name), out.raw);
        if (v.size() != 1 || v[0] < 1)
          throw Error(ErrorCode::ParseFailure, with_raw("expected one class number", out.raw));
        (p == 3 ? h.real_quad_class_number : h.k_zetap_class_number) = v[0];
        r.hilbert_aux = h;
        r.provenance["hilbert_aux"] = prov;
        break;
      }
      case TaskKind::LayerClassNumbers: {
        std::optional<int> c = task.c;
        if (!c && base && base->layers)
          for (const auto& l : *base->layers)
            if (l.tower == task.tower) c = l.c;
        if (!c) throw Error(ErrorCode::TaskUnsupported, "stability index c unknown for tower " + task.tower);
        Layer layer{task.tower, *c, {}};
        for (int n = 0; n <= task.depth; ++n)
          layer.ords.push_back(
              p_exponent_sum(parse_integers(need_block(out, "layer_" + std::to_string(n)), out.raw), p, out.raw));
        r.layers = std::vector<Layer>{layer};
        r.provenance["layers"] = prov;
        break;
      }
      case TaskKind::Capitulation: {
        std::vector<Capitulation> caps = r.capitulation.value_or(std::vector<Capitulation>{});
        for (const auto& g : task.generators) {
          const auto v = parse_integers(need_block(out, "capitulation_" + g), out.raw);
          if (v.size() != 1 || (v[0] != 0 && v[0] != 1))
            throw Error(ErrorCode::ParseFailure, with_raw("expected 0 or 1 for " + g, out.raw));
          caps.push_back({g, task.layer, v[0] == 1});
        }
        r.capitulation = caps;
        r.provenance["capitulation"] = prov;
        break;
      }
    }
  }
  validate_record(r);
  return r;
}

}  // namespace ggc::cas
