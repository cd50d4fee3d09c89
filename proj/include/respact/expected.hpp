#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace respact {

template <typename E>
struct Unexpected {
    E error;
};

template <typename E>
Unexpected<std::decay_t<E>> unexpected(E&& e) {
    return {std::forward<E>(e)};
}

// Minimal value-or-error holder; std::expected is not available in C++20.
template <typename T, typename E>
class Expected {
public:
    Expected(T value) : data_(std::in_place_index<0>, std::move(value)) {}
    Expected(Unexpected<E> err) : data_(std::in_place_index<1>, std::move(err.error)) {}

    bool has_value() const noexcept { return data_.index() == 0; }
    explicit operator bool() const noexcept { return has_value(); }

    T& value() & {
        if (!has_value()) throw std::logic_error("Expected: no value");
        return std::get<0>(data_);
    }
    const T& value() const& {
        if (!has_value()) throw std::logic_error("Expected: no value");
        return std::get<0>(data_);
    }
    T&& value() && {
        if (!has_value()) throw std::logic_error("Expected: no value");
        return std::get<0>(std::move(data_));
    }
    const E& error() const {
        if (has_value()) throw std::logic_error("Expected: no error");
        return std::get<1>(data_);
    }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }

private:
    std::variant<T, E> data_;
};

}  // namespace respact
