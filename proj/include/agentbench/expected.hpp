#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace agentbench {

// Minimal stand-in for std::expected (C++23). Holds either a value or an error.
template <typename E>
struct Unexpected {
    E error;
};

template <typename E>
Unexpected<std::decay_t<E>> unexpected(E&& e) {
    return {std::forward<E>(e)};
}

class BadExpectedAccess : public std::logic_error {
public:
    BadExpectedAccess() : std::logic_error("Expected accessed in the wrong state") {}
};

template <typename T, typename E>
class Expected {
public:
    Expected(const T& value) : data_(std::in_place_index<0>, value) {}
    Expected(T&& value) : data_(std::in_place_index<0>, std::move(value)) {}
    template <typename G>
    Expected(Unexpected<G> u) : data_(std::in_place_index<1>, std::move(u.error)) {}

    bool has_value() const noexcept { return data_.index() == 0; }
    explicit operator bool() const noexcept { return has_value(); }

    T& value() & {
        if (!has_value()) throw BadExpectedAccess();
        return std::get<0>(data_);
    }
    const T& value() const& {
        if (!has_value()) throw BadExpectedAccess();
        return std::get<0>(data_);
    }
    T&& value() && {
        if (!has_value()) throw BadExpectedAccess();
        return std::get<0>(std::move(data_));
    }
    const E& error() const& {
        if (has_value()) throw BadExpectedAccess();
        return std::get<1>(data_);
    }

    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }

private:
    std::variant<T, E> data_;
};

template <typename E>
class Expected<void, E> {
public:
    Expected() = default;
    template <typename G>
    Expected(Unexpected<G> u) : error_(std::move(u.error)), ok_(false) {}

    bool has_value() const noexcept { return ok_; }
    explicit operator bool() const noexcept { return ok_; }
    const E& error() const {
        if (ok_) throw BadExpectedAccess();
        return error_;
    }

private:
    E error_{};
    bool ok_ = true;
};

}  // namespace agentbench
