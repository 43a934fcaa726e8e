// Copyright 2026 The optperf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "optperf/orchestrator/download.h"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <sstream>
#include <thread>
#include <vector>

extern char** environ;

namespace optperf::orchestrator {
namespace {

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void ReplaceAll(std::string& s, const std::string& from, const std::string& to) {
  for (size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

const char* ToString(Outcome o) {
  switch (o) {
    case Outcome::kOk: return "OK";
    case Outcome::kDnsFail: return "DNSFail";
    case Outcome::kConnectFail: return "ConnectFail";
    case Outcome::kIncomplete: return "Incomplete";
    case Outcome::kBlocked: return "Blocked";
  }
  return "Incomplete";
}

std::optional<Outcome> ParseOutcome(const std::string& s) {
  for (Outcome o : {Outcome::kOk, Outcome::kDnsFail, Outcome::kConnectFail, Outcome::kIncomplete,
                    Outcome::kBlocked}) {
    if (s == ToString(o)) return o;
  }
  return std::nullopt;
}

bool IsPageContentType(const std::string& content_type) {
  const std::string ct = Lower(content_type.substr(0, content_type.find(';')));
  if (ct.empty()) return true;
  return ct.rfind("text/", 0) == 0 || ct == "application/xhtml+xml" || ct == "application/json";
}

DownloadResult ClassifyFetch(const net::FetchResult& f) {
  DownloadResult r;
  r.http_status = f.status;
  r.bytes = f.body_bytes;
  r.content_type = f.header("content-type").value_or("");
  switch (f.error) {
    case net::FetchError::kNone: break;
    case net::FetchError::kCertificate:
      r.outcome = Outcome::kConnectFail;
      r.reason = "certificate: " + f.error_detail;
      return r;
    case net::FetchError::kConnect:
      r.outcome = Outcome::kConnectFail;
      r.reason = "connect: " + f.error_detail;
      return r;
    case net::FetchError::kTimeout:
    case net::FetchError::kTransfer:
    case net::FetchError::kAborted:
      if (f.status == 0) {
        r.outcome = f.error == net::FetchError::kTimeout ? Outcome::kIncomplete : Outcome::kConnectFail;
        r.reason = std::string(net::ToString(f.error)) + ": " + f.error_detail;
        return r;
      }
      r.outcome = Outcome::kIncomplete;
      r.reason = std::string(net::ToString(f.error)) + " after " + std::to_string(f.body_bytes) +
                 " bytes";
      return r;
  }
  if ((f.status == 403 || f.status == 503) && IsPageContentType(r.content_type)) {
    r.outcome = Outcome::kBlocked;
    r.reason = "HTTP " + std::to_string(f.status) + " " + r.content_type;
    return r;
  }
  if (f.status < 200 || f.status >= 300) {
    r.outcome = Outcome::kIncomplete;
    r.reason = "HTTP " + std::to_string(f.status);
    return r;
  }
  if (const auto cl = f.header("content-length")) {
    uint64_t declared = 0;
    const auto [p, ec] = std::from_chars(cl->data(), cl->data() + cl->size(), declared);
    if (ec == std::errc() && declared != f.body_bytes) {
      r.outcome = Outcome::kIncomplete;
      r.reason = "body " + std::to_string(f.body_bytes) + " of " + std::to_string(declared) + " bytes";
      return r;
    }
  }
  return r;
}

DownloadResult ForcedIpDownload(const net::Url& url, const IpAddress& ip,
                                const net::FetchOptions& options) {
  return ClassifyFetch(net::Fetch("GET", url, ip, options));
}

QuicAdapter ParseQuicAdapter(const std::string& spec) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw std::invalid_argument("QUIC adapter must be id=command-template, got '" + spec + "'");
  }
  QuicAdapter a{spec.substr(0, eq), spec.substr(eq + 1)};
  const std::string& id = a.id;
  if (!std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
      })) {
    throw std::invalid_argument("bad QUIC adapter id '" + id + "'");
  }
  return a;
}

DownloadResult RunQuicAdapter(const QuicAdapter& adapter, const net::Url& url,
                              const IpAddress& ip, const std::filesystem::path& output,
                              std::chrono::milliseconds timeout) {
  std::vector<std::string> args;
  std::istringstream ss(adapter.command_template);
  for (std::string w; ss >> w;) {
    ReplaceAll(w, "{url}", url.ToString());
    ReplaceAll(w, "{ip}", ip.ToString());
    ReplaceAll(w, "{host}", url.host);
    ReplaceAll(w, "{port}", std::to_string(url.port));
    ReplaceAll(w, "{output}", output.string());
    args.push_back(w);
  }
  if (args.empty()) throw std::runtime_error("QUIC adapter " + adapter.id + ": empty command");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  std::error_code ec;
  std::filesystem::remove(output, ec);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  const std::string log = output.string() + ".log";
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw std::runtime_error("QUIC adapter " + adapter.id + ": cannot start " + args[0] + ": " +
                             std::strerror(rc));
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  bool timed_out = false;
  for (;;) {
    const pid_t w = ::waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (std::chrono::steady_clock::now() > deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }

  DownloadResult r;
  r.bytes = std::filesystem::exists(output, ec) ? std::filesystem::file_size(output, ec) : 0;
  const bool exited_ok = !timed_out && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  if (exited_ok && r.bytes > 0) return r;
  if (timed_out) {
    r.outcome = Outcome::kIncomplete;
    r.reason = "timeout after " + std::to_string(r.bytes) + " bytes";
  } else if (r.bytes == 0) {
    r.outcome = Outcome::kConnectFail;
    r.reason = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                 : "killed by signal " + std::to_string(WTERMSIG(status));
  } else {
    r.outcome = Outcome::kIncomplete;
    r.reason = "exit status " + std::to_string(WEXITSTATUS(status)) + " after " +
               std::to_string(r.bytes) + " bytes";
  }
  return r;
}

}  // namespace optperf::orchestrator
