#pragma once

// Tokenizer for .qir text. Notable composite tokens: `(x)` tensor, `^t`
// transpose, `^-1` inverse, `I_{` identity-over-set opener, `--` comment to
// end of line.

#include <cctype>
#include <string>
#include <vector>

#include "qiral/shape.hpp"

namespace qiral {

enum class Tok {
    End,
    Ident,
    Number,
    Equals,    // =
    Semi,      // ;
    Comma,     // ,
    Colon,     // :
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    TensorOp,  // (x)
    CaretT,    // ^t
    CaretInv,  // ^-1
    Less,
    Greater,
    Pipe,
    IdentityBrace, // I_{
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double num = 0.0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : s_(src) {}

    std::vector<Token> run(std::vector<Diag>& errors) {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            if (eof()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                    id += take();
                if (id == "I_" && !eof() && peek() == '{') {
                    take();
                    t.kind = Tok::IdentityBrace;
                } else {
                    t.kind = Tok::Ident;
                    t.text = id;
                }
                out.push_back(t);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string num;
                while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.'))
                    num += take();
                if (!eof() && (peek() == 'e' || peek() == 'E')) {
                    size_t save = pos_;
                    int save_col = col_;
                    std::string exp;
                    exp += take();
                    if (!eof() && (peek() == '+' || peek() == '-')) exp += take();
                    if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) exp += take();
                        num += exp;
                    } else {
                        pos_ = save; // 'e' starts an identifier, not an exponent
                        col_ = save_col;
                    }
                }
                t.kind = Tok::Number;
                t.text = num;
                t.num = std::stod(num);
                out.push_back(t);
                continue;
            }
            switch (c) {
            case '(':
                if (pos_ + 2 < s_.size() && s_[pos_ + 1] == 'x' && s_[pos_ + 2] == ')') {
                    take(); take(); take();
                    t.kind = Tok::TensorOp;
                } else {
                    take();
                    t.kind = Tok::LParen;
                }
                break;
            case ')': take(); t.kind = Tok::RParen; break;
            case '{': take(); t.kind = Tok::LBrace; break;
            case '}': take(); t.kind = Tok::RBrace; break;
            case '[': take(); t.kind = Tok::LBracket; break;
            case ']': take(); t.kind = Tok::RBracket; break;
            case '=': take(); t.kind = Tok::Equals; break;
            case ';': take(); t.kind = Tok::Semi; break;
            case ',': take(); t.kind = Tok::Comma; break;
            case ':': take(); t.kind = Tok::Colon; break;
            case '+': take(); t.kind = Tok::Plus; break;
            case '*': take(); t.kind = Tok::Star; break;
            case '/': take(); t.kind = Tok::Slash; break;
            case '<': take(); t.kind = Tok::Less; break;
            case '>': take(); t.kind = Tok::Greater; break;
            case '|': take(); t.kind = Tok::Pipe; break;
            case '-':
                take();
                t.kind = Tok::Minus;
                break;
            case '^':
                take();
                if (!eof() && peek() == 't') {
                    take();
                    t.kind = Tok::CaretT;
                } else if (pos_ + 1 < s_.size() && s_[pos_] == '-' && s_[pos_ + 1] == '1') {
                    take(); take();
                    t.kind = Tok::CaretInv;
                } else {
                    errors.push_back({t.line, t.col, "expected ^t or ^-1 after '^'"});
                    continue;
                }
                break;
            default:
                errors.push_back({t.line, t.col, std::string("unexpected character '") + c + "'"});
                take();
                continue;
            }
            out.push_back(t);
        }
    }

private:
    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    char take() {
        char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_space() {
        while (!eof()) {
            char c = peek();
            if (c == '-' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '-') {
                while (!eof() && peek() != '\n') take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                return;
            }
        }
    }
};

} // namespace qiral
