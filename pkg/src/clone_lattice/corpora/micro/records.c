/* Walking arrays that hang off a struct. */

typedef struct { int n_items; int *items; int last; } list_t;
typedef struct { int rows; int *cells; int total; } table_t;

int list_sum(list_t *lst, int *weights)
{
    int i, sum;
    sum = 0;
    for (i = 0; i < lst->n_items; i++) {
        sum = sum + lst->items[i] * weights[i];
    }
    lst->last = sum;
    return sum;
}

void table_dot(table_t *tab, int *coef)
{
    int r, acc;
    acc = 0;
    for (r = 0; r < tab->rows; r++) {
        acc = acc + tab->cells[r] * coef[r];
    }
    tab->total = acc;
}
