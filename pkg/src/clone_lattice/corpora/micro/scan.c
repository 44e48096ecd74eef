/* Scanning loops with a running cursor. */

int count_char(char *s, int limit, char c)
{
    int n, pos;
    n = 0;
    pos = 0;
    while (pos < limit) {
        if (s[pos] == c)
            n++;
        pos++;
    }
    return n;
}

int find_last(char *buf, int len, char key)
{
    int idx, last;
    last = -1;
    idx = 0;
    while (idx < len) {
        if (buf[idx] == key)
            last = idx;
        idx++;
    }
    return last;
}

void fill_words(int *p, int n, int v)
{
    while (n > 0) {
        *p = v;
        p++;
        n = n - 1;
    }
}

int poison_words(unsigned *w, int count, unsigned pattern)
{
    int done;
    done = 0;
    while (count > 0) {
        *w = pattern;
        w++;
        count = count - 1;
        done++;
    }
    return done;
}
