#include "metais/external.hpp"

#include <charconv>
#include <csignal>
#include <cstring>
#include <string_view>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace metais {
namespace {

struct Fd {
  int fd = -1;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> external_g(const std::string& command, const PointSet& points, std::chrono::milliseconds timeout) {
  if (points.empty()) return {};

  std::string input;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto x = points[i];
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k) input += ',';
      input += format_double(x[k]);
    }
    input += '\n';
  }

  // a child that exits early must not kill us through SIGPIPE
  static const bool sigpipe_ignored = [] { return std::signal(SIGPIPE, SIG_IGN) != SIG_ERR; }();
  (void)sigpipe_ignored;

  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw ExternalError(errno_text("external_g: pipe"));
  Fd in_r{in_pipe[0]}, in_w{in_pipe[1]};
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw ExternalError(errno_text("external_g: pipe"));
  Fd out_r{out_pipe[0]}, out_w{out_pipe[1]};

  const pid_t pid = ::fork();
  if (pid < 0) throw ExternalError(errno_text("external_g: fork"));
  if (pid == 0) {
    ::dup2(in_r.fd, STDIN_FILENO);
    ::dup2(out_w.fd, STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  in_r.reset();
  out_w.reset();
  ::fcntl(in_w.fd, F_SETFL, O_NONBLOCK);

  std::string output;
  std::size_t written = 0;
  bool timed_out = false;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (out_r.fd >= 0) {
    pollfd fds[2];
    nfds_t nfds = 0;
    fds[nfds++] = {out_r.fd, POLLIN, 0};
    if (in_w.fd >= 0) fds[nfds++] = {in_w.fd, POLLOUT, 0};
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    const int rc = ::poll(fds, nfds, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nfds > 1 && fds[1].revents) {
      if (fds[1].revents & (POLLERR | POLLHUP)) {
        in_w.reset();
      } else {
        const ssize_t n = ::write(in_w.fd, input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        else if (n < 0 && errno != EAGAIN && errno != EINTR) in_w.reset();
        if (written == input.size()) in_w.reset();
      }
    }
    if (fds[0].revents) {
      char buf[65536];
      const ssize_t n = ::read(out_r.fd, buf, sizeof buf);
      if (n > 0) output.append(buf, static_cast<std::size_t>(n));
      else if (n == 0 || (errno != EAGAIN && errno != EINTR)) out_r.reset();
    }
  }
  in_w.reset();
  out_r.reset();

  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out)
    throw ExternalError("external_g: timeout after " + std::to_string(timeout.count()) + " ms: " + command);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string how = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                              : "signal " + std::to_string(WTERMSIG(status));
    throw ExternalError("external_g: child failed with " + how + ": " + command);
  }

  std::vector<double> values;
  values.reserve(points.size());
  std::string_view rest(output);
  std::size_t line_no = 0;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() && rest.empty()) break;
    double v = 0.0;
    const char* first = line.data();
    if (!line.empty() && line.front() == '+') ++first;
    auto res = std::from_chars(first, line.data() + line.size(), v);
    if (line.empty() || res.ec != std::errc() || res.ptr != line.data() + line.size())
      throw ExternalError("external_g: malformed value on line " + std::to_string(line_no) + ": '" + std::string(line) + "'");
    values.push_back(v);
  }
  if (values.size() != points.size())
    throw ExternalError("external_g: expected " + std::to_string(points.size()) + " values, got " +
                        std::to_string(values.size()) + " (line " + std::to_string(values.size() + 1) + " missing)");
  return values;
}

}  // namespace metais
