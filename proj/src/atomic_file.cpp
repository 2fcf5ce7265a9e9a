#include "gradekit/atomic_file.hpp"

#include "gradekit/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sys/stat.h>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;

namespace gradekit {

namespace {

class TempFile {
public:
    explicit TempFile(const fs::path& target)
    {
        std::string pattern = (target.parent_path() / ("." + target.filename().string() + ".tmp.XXXXXX")).string();
        path_ = pattern;
        fd_ = ::mkstemp(path_.data());
        if (fd_ < 0) {
            throw IoFailure("cannot create temporary file for '" + target.string() + "': " + std::strerror(errno));
        }
    }

    ~TempFile()
    {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        if (!committed_) {
            ::unlink(path_.c_str());
        }
    }

    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    void write(std::string_view data)
    {
        const char* p = data.data();
        std::size_t left = data.size();
        while (left > 0) {
            ssize_t n = ::write(fd_, p, left);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                throw IoFailure("write to '" + path_ + "' failed: " + std::strerror(errno));
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
    }

    void commit(const fs::path& target)
    {
        ::fchmod(fd_, 0644);
        if (::fsync(fd_) != 0) {
            throw IoFailure("fsync of '" + path_ + "' failed: " + std::strerror(errno));
        }
        ::close(fd_);
        fd_ = -1;
        if (std::rename(path_.c_str(), target.c_str()) != 0) {
            throw IoFailure("cannot rename '" + path_ + "' to '" + target.string() + "': " + std::strerror(errno));
        }
        committed_ = true;
    }

private:
    std::string path_;
    int fd_ = -1;
    bool committed_ = false;
};

} // namespace

void write_file_atomically(const fs::path& path, std::string_view data)
{
    fs::path target = path;
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            throw IoFailure("cannot create directory '" + target.parent_path().string() + "': " + ec.message());
        }
    } else {
        target = fs::path(".") / target;
    }
    TempFile tmp(target);
    tmp.write(data);
    tmp.commit(target);
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoFailure("error reading '" + path.string() + "'");
    }
    return buf.str();
}

} // namespace gradekit
