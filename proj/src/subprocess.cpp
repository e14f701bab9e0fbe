#include "vgen/subprocess.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <stdexcept>

namespace vgen {

RunResult run_command(const std::string& command, double timeout_seconds,
                      size_t max_output_bytes) {
  using clock = std::chrono::steady_clock;

  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe() failed");

  const auto start = clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw std::runtime_error("fork() failed");
  }
  if (pid == 0) {
    // Child: own process group so a timeout kill reaps grandchildren too.
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);

  RunResult r;
  const auto deadline =
      start + std::chrono::duration_cast<clock::duration>(
                  std::chrono::duration<double>(timeout_seconds));
  bool killed = false;
  int grace_polls = 0;
  char buf[4096];

  for (;;) {
    auto now = clock::now();
    if (!killed && now >= deadline) {
      r.timed_out = true;
      killed = true;
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
    }
    int wait_ms;
    if (killed) {
      // The group is dead; EOF is imminent unless an escaped grandchild
      // still holds the pipe.  Bounded grace, then stop reading.
      if (++grace_polls > 40) break;
      wait_ms = 50;
    } else {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      wait_ms = left < 1 ? 1 : (left > 1000 ? 1000 : static_cast<int>(left));
    }

    struct pollfd pfd{fds[0], POLLIN, 0};
    int pr = poll(&pfd, 1, wait_ms);
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) continue;
    if (pfd.revents & POLLIN) {
      ssize_t n = read(fds[0], buf, sizeof buf);
      if (n <= 0) break;
      size_t room = max_output_bytes > r.output.size() ? max_output_bytes - r.output.size() : 0;
      if (room > 0) {
        r.output.append(buf, static_cast<size_t>(n) < room ? static_cast<size_t>(n) : room);
      }
    } else if (pfd.revents & (POLLHUP | POLLERR)) {
      break;
    }
  }
  close(fds[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFSIGNALED(status)) {
    r.term_signal = WTERMSIG(status);
  } else if (WIFEXITED(status)) {
    r.exit_code = WEXITSTATUS(status);
  }
  r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count();
  return r;
}

}  // namespace vgen
